use super::masks::{build_masks, MaskSet, MaskedObservation};
use super::model::{EvolutionNoise, ModelSpec, NmiwState, StatePrior, UpdateMode};
use super::update::{
    discount_noise, evolve, forecast, update_classical, update_missing, ForecastResult,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Everything computed at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    /// 1-based time index.
    pub t: usize,
    pub prior: StatePrior<T>,
    pub forecast: ForecastResult<T>,
    pub observation: MaskedObservation<T>,
    /// `Y - f`, zero where missing.
    pub residual: Matrix<T>,
    /// Masks of the observation as recorded (not the ones a classical
    /// update effectively applies).
    pub masks: MaskSet<T>,
    pub posterior: NmiwState<T>,
    /// `e_kj / sqrt(Q_kk s_jj)` per entry, row-major `r x p`; `None` where
    /// missing. `s_jj` is taken from the time `t - 1` posterior.
    pub standardized: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput<T> {
    pub mode: UpdateMode,
    pub steps: Vec<StepRecord<T>>,
}

impl<T: Scalar> FilterOutput<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_state(&self) -> Option<&NmiwState<T>> {
        self.steps.last().map(|s| &s.posterior)
    }
}

/// Runs the forward filter over `data` starting from `prior`.
///
/// Errors carry the 1-based time index at which they occurred.
pub fn filter<T: Scalar>(
    model: &ModelSpec<T>,
    data: &[MaskedObservation<T>],
    prior: &NmiwState<T>,
    mode: UpdateMode,
) -> Result<FilterOutput<T>> {
    if data.is_empty() {
        return Err(Error::Domain(
            "filter needs at least one observation".into(),
        ));
    }
    if prior.state_dim() != model.state_dim() || prior.obs_dim() != model.obs_dim() {
        return Err(Error::dims(
            "filter prior",
            format!("{}x{}", model.state_dim(), model.obs_dim()),
            format!("{}x{}", prior.state_dim(), prior.obs_dim()),
        ));
    }
    model.check_horizon(data.len())?;

    let mut state = prior.clone();
    let mut steps = Vec::with_capacity(data.len());
    for (i, obs) in data.iter().enumerate() {
        let t = i + 1;
        let record = step(model, &state, obs, t, mode).map_err(|e| e.at_time(t))?;
        state = record.posterior.clone();
        steps.push(record);
    }
    Ok(FilterOutput { mode, steps })
}

fn step<T: Scalar>(
    model: &ModelSpec<T>,
    state: &NmiwState<T>,
    obs: &MaskedObservation<T>,
    t: usize,
    mode: UpdateMode,
) -> Result<StepRecord<T>> {
    let (r, p) = (model.replicates(), model.obs_dim());
    if (obs.replicates(), obs.dim()) != (r, p) {
        return Err(Error::dims(
            "observation",
            format!("{r}x{p}"),
            format!("{}x{}", obs.replicates(), obs.dim()),
        ));
    }
    let g = model.evolution(t)?;
    let w = match model.noise() {
        EvolutionNoise::Explicit(ws) => ws
            .at(t)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("W schedule has no entry for time {t}")))?,
        EvolutionNoise::Discount(delta) => discount_noise(&state.cov, g, *delta)?,
    };
    let prior = evolve(state, g, &w)?;
    let fc = forecast(&prior, model.design(t)?, model.obs_cov(t)?)?;
    let residual = fc.residual(obs)?;
    let posterior = match mode {
        UpdateMode::New => update_missing(&prior, &fc, obs)?,
        UpdateMode::Classical => update_classical(&prior, &fc, obs)?,
    };

    if !(fc.f.is_finite() && fc.q.as_matrix().is_finite()) {
        return Err(Error::NonFinite("forecast"));
    }
    if !(posterior.mean.is_finite()
        && posterior.cov.as_matrix().is_finite()
        && posterior.miw.scale().as_matrix().is_finite())
    {
        return Err(Error::NonFinite("posterior"));
    }

    let s = prior.miw.scale().as_matrix();
    let q = fc.q.as_matrix();
    let mut standardized = Vec::with_capacity(r * p);
    for k in 0..r {
        for j in 0..p {
            standardized.push(
                obs.is_observed(k, j)
                    .then(|| residual[(k, j)] / (q[(k, k)] * s[(j, j)]).sqrt()),
            );
        }
    }

    Ok(StepRecord {
        t,
        masks: build_masks(obs),
        prior,
        forecast: fc,
        observation: obs.clone(),
        residual,
        posterior,
        standardized,
    })
}
