//! Bayesian filtering for matrix-variate dynamic linear models whose
//! observation covariance follows a modified inverted Wishart law with one
//! degree of freedom per variable. Observed entries of a partially missing
//! observation update only the variables they belong to.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod dlm;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use dlm::{build_masks, correlation_estimate, filter, msse, UpdateMode};

pub type Matrix = linalg::Matrix<f64>;
pub type SymMatrix = linalg::SymMatrix<f64>;
pub type SpdMatrix = linalg::SpdMatrix<f64>;
pub type DiagMatrix = linalg::DiagMatrix<f64>;

pub type MiwParams = distributions::MiwParams<f64>;
pub type MtParams = distributions::MtParams<f64>;
pub type MatrixNormalParams = distributions::MatrixNormalParams<f64>;
pub type IgParams = distributions::IgParams<f64>;

pub type ModelSpec = dlm::ModelSpec<f64>;
pub type NmiwState = dlm::NmiwState<f64>;
pub type StatePrior = dlm::StatePrior<f64>;
pub type MaskedObservation = dlm::MaskedObservation<f64>;
pub type MaskSet = dlm::MaskSet<f64>;
pub type ForecastResult = dlm::ForecastResult<f64>;
pub type FilterOutput = dlm::FilterOutput<f64>;
pub type EvolutionNoise = dlm::EvolutionNoise<f64>;
