//! Modified inverted Wishart family: the inverted Wishart law under the
//! per-variable degrees-of-freedom reparameterization, the matrix normal
//! law, the modified matrix-t forecast law, inverted-gamma diagonal
//! marginals, and Monte-Carlo samplers used as test oracles.
//!
//! All densities are returned on the log scale.

mod matrix_normal;
mod matrix_t;
mod miw;
mod sample;

pub use matrix_normal::{matrix_normal_log_density, MatrixNormalParams};
pub use matrix_t::{mt_log_density, MtParams};
pub use miw::{
    diag_marginal_ig, iw_log_density, iw_to_miw, miw_conditional_update, miw_log_density,
    miw_marginal_block, miw_mean, miw_to_iw, IgParams, MiwParams,
};
pub use sample::{sample_matrix_normal, sample_miw};

pub(crate) use miw::rescale_scaled_scale;
