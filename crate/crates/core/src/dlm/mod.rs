//! Matrix-variate dynamic linear model
//!
//! ```text
//! y_tᵀ = F_tᵀ Θ_t + ε_tᵀ,   Θ_t = G_t Θ_{t-1} + ω_t,
//! ε_t | Σ ~ N(0, V_t, Σ),    ω_t | Σ ~ N(0, W_t, Σ),
//! ```
//!
//! filtered with a joint normal / modified inverted Wishart state so that
//! each variable carries its own degrees of freedom. Observations are held
//! as `r x p` matrices (the transposed `y_tᵀ`), states as `d x p`.

mod filter;
mod masks;
mod metrics;
mod model;
mod update;

pub use filter::{filter, FilterOutput, StepRecord};
pub use masks::{build_masks, MaskSet, MaskedObservation};
pub use metrics::{correlation_estimate, missing_time_correlations, msse};
pub use model::{EvolutionNoise, ModelSpec, NmiwState, Schedule, StatePrior, UpdateMode};
pub use update::{
    discount_noise, evolve, forecast, update_classical, update_full, update_missing, ForecastResult,
};
