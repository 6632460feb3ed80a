//! Bivariate local-level data generation and the replication harness that
//! compares the masked recursions with the all-or-nothing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dlm::{
    filter, missing_time_correlations, msse, EvolutionNoise, FilterOutput, MaskedObservation,
    ModelSpec, NmiwState, Schedule, UpdateMode,
};
use crate::error::{Error, Result};
use crate::linalg::{DiagMatrix, Matrix, SpdMatrix, SymMatrix};
use crate::scalar::Scalar;

/// `y_t = ψ_t + ε_t`, `ψ_t = ψ_{t-1} + ζ_t` in two dimensions, with
/// correlated `ε_t` and uncorrelated `ζ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLevelConfig {
    pub len: usize,
    /// Correlation between the two observation-noise components.
    pub corr: f64,
    pub obs_var: [f64; 2],
    pub level_var: [f64; 2],
    /// Variances of the independent zero-mean `ψ_0` components.
    pub initial_var: [f64; 2],
    pub seed: u64,
}

impl Default for LocalLevelConfig {
    fn default() -> Self {
        Self {
            len: 100,
            corr: 0.8,
            obs_var: [1.0, 1.0],
            level_var: [0.05, 0.05],
            initial_var: [1.0, 1.0],
            seed: 0,
        }
    }
}

impl LocalLevelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.len == 0 {
            return Err(Error::Domain("series length must be at least 1".into()));
        }
        if !(self.corr.abs() < 1.0) {
            return Err(Error::Domain(format!(
                "|corr| must be < 1, got {}",
                self.corr
            )));
        }
        let vars = self
            .obs_var
            .iter()
            .chain(&self.level_var)
            .chain(&self.initial_var);
        if let Some(v) = vars.into_iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!(
                "variances must be positive, got {v}"
            )));
        }
        Ok(())
    }
}

/// Generated levels `ψ_1..ψ_T` and observations `y_1..y_T`, each `T x 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSeries {
    pub levels: Matrix<f64>,
    pub data: Matrix<f64>,
}

pub fn gen_local_level(cfg: &LocalLevelConfig) -> Result<SimulatedSeries> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut z = move || -> f64 { StandardNormal.sample(&mut rng) };
    let obs_sd = cfg.obs_var.map(f64::sqrt);
    let level_sd = cfg.level_var.map(f64::sqrt);
    let tail = (1.0 - cfg.corr * cfg.corr).sqrt();

    let mut psi = [
        cfg.initial_var[0].sqrt() * z(),
        cfg.initial_var[1].sqrt() * z(),
    ];
    let mut levels = Matrix::zeros(cfg.len, 2);
    let mut data = Matrix::zeros(cfg.len, 2);
    for t in 0..cfg.len {
        for (j, level) in psi.iter_mut().enumerate() {
            *level += level_sd[j] * z();
        }
        let (z1, z2) = (z(), z());
        let eps = [obs_sd[0] * z1, obs_sd[1] * (cfg.corr * z1 + tail * z2)];
        for j in 0..2 {
            levels[(t, j)] = psi[j];
            data[(t, j)] = psi[j] + eps[j];
        }
    }
    Ok(SimulatedSeries { levels, data })
}

/// Missing entries as `(time, variables)` with 1-based indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MissingPattern {
    pub entries: Vec<(usize, Vec<usize>)>,
}

impl MissingPattern {
    pub fn new(entries: Vec<(usize, Vec<usize>)>) -> Self {
        Self { entries }
    }

    /// Gaps at t = 24, 43, 86 (second variable), 75 (first) and 60 (both).
    pub fn reference() -> Self {
        Self::new(vec![
            (24, vec![2]),
            (43, vec![2]),
            (60, vec![1, 2]),
            (75, vec![1]),
            (86, vec![2]),
        ])
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|(_, vars)| vars.is_empty())
    }

    pub fn total_missing(&self) -> usize {
        self.entries.iter().map(|(_, vars)| vars.len()).sum()
    }

    pub fn validate(&self, len: usize, p: usize) -> Result<()> {
        for (t, vars) in &self.entries {
            if *t == 0 || *t > len {
                return Err(Error::Domain(format!("missing time {t} outside 1..={len}")));
            }
            if let Some(j) = vars.iter().find(|&&j| j == 0 || j > p) {
                return Err(Error::Domain(format!(
                    "missing variable {j} outside 1..={p} at time {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Turns rows of `data` into `1 x p` observations with the pattern's
/// entries masked out.
pub fn apply_missing<T: Scalar>(
    data: &Matrix<T>,
    pattern: &MissingPattern,
) -> Result<Vec<MaskedObservation<T>>> {
    let (len, p) = data.shape();
    pattern.validate(len, p)?;
    let mut observed = vec![true; len * p];
    for (t, vars) in &pattern.entries {
        for j in vars {
            observed[(t - 1) * p + (j - 1)] = false;
        }
    }
    (0..len)
        .map(|t| {
            MaskedObservation::new(
                Matrix::new(1, p, data.row(t).to_vec())?,
                observed[t * p..(t + 1) * p].to_vec(),
            )
        })
        .collect()
}

/// Model and prior used for every replication.
#[derive(Debug, Clone)]
pub struct ExperimentSetup {
    pub model: ModelSpec<f64>,
    pub prior: NmiwState<f64>,
}

impl ExperimentSetup {
    /// Bivariate local-level model with scalar evolution variance `w` and
    /// the vague prior `m₀ = 0`, `P₀ = p0`, `S₀ = I`, `N₀ = I`.
    pub fn local_level(w: f64, p0: f64) -> Result<Self> {
        let sym1 = |x: f64| SymMatrix::new(Matrix::from_fn(1, 1, |_, _| x));
        let model =
            ModelSpec::local_level(2, EvolutionNoise::Explicit(Schedule::Constant(sym1(w)?)))?;
        let prior = NmiwState::prior(
            Matrix::zeros(1, 2),
            sym1(p0)?,
            SpdMatrix::identity(2),
            DiagMatrix::identity(2),
        )?;
        Ok(Self { model, prior })
    }
}

/// One simulated series filtered in both modes.
#[derive(Debug, Clone)]
pub struct ReplicationRun {
    pub series: SimulatedSeries,
    pub observations: Vec<MaskedObservation<f64>>,
    pub new: FilterOutput<f64>,
    pub classical: FilterOutput<f64>,
}

pub fn run_replication(
    cfg: &LocalLevelConfig,
    pattern: &MissingPattern,
    setup: &ExperimentSetup,
) -> Result<ReplicationRun> {
    let series = gen_local_level(cfg)?;
    let observations = apply_missing(&series.data, pattern)?;
    let new = filter(&setup.model, &observations, &setup.prior, UpdateMode::New)?;
    let classical = filter(
        &setup.model,
        &observations,
        &setup.prior,
        UpdateMode::Classical,
    )?;
    Ok(ReplicationRun {
        series,
        observations,
        new,
        classical,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub index: usize,
    pub seed: u64,
    pub msse_new: Vec<f64>,
    pub msse_classical: Vec<f64>,
    /// Mean posterior correlation at partial-missing times (new mode).
    pub missing_corr_new: Option<f64>,
    pub missing_corr_classical: Option<f64>,
}

impl ReplicationResult {
    /// New-mode MSSE is no larger than classical in every component.
    pub fn new_wins(&self) -> bool {
        self.msse_new
            .iter()
            .zip(&self.msse_classical)
            .all(|(n, c)| n <= c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub replications: Vec<ReplicationResult>,
    pub mean_msse_new: Vec<f64>,
    pub mean_msse_classical: Vec<f64>,
    /// Fraction of replications where [`ReplicationResult::new_wins`] holds.
    pub win_fraction: f64,
    /// Per-component fraction with new-mode MSSE ≤ classical.
    pub component_win_fraction: Vec<f64>,
    pub mean_missing_corr_new: Option<f64>,
    pub mean_missing_corr_classical: Option<f64>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarize(index: usize, seed: u64, run: &ReplicationRun) -> Result<ReplicationResult> {
    let corr = |out: &FilterOutput<f64>| -> Result<Option<f64>> {
        Ok(mean_of(
            missing_time_correlations(out)?.into_iter().map(|c| c.3),
        ))
    };
    Ok(ReplicationResult {
        index,
        seed,
        msse_new: msse(&run.new)?,
        msse_classical: msse(&run.classical)?,
        missing_corr_new: corr(&run.new)?,
        missing_corr_classical: corr(&run.classical)?,
    })
}

/// Runs `replications` independent simulations (seed `cfg.seed + i`), filters
/// each in both modes and aggregates the comparison.
pub fn replicate_experiment(
    replications: usize,
    cfg: &LocalLevelConfig,
    pattern: &MissingPattern,
    setup: &ExperimentSetup,
) -> Result<ExperimentSummary> {
    if replications == 0 {
        return Err(Error::Domain("need at least one replication".into()));
    }
    cfg.validate()?;
    pattern.validate(cfg.len, 2)?;
    let results: Vec<ReplicationResult> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i as u64);
            let rep_cfg = LocalLevelConfig {
                seed,
                ..cfg.clone()
            };
            run_replication(&rep_cfg, pattern, setup)
                .and_then(|run| summarize(i, seed, &run))
                .map_err(|e| Error::AtReplication {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let p = results[0].msse_new.len();
    let m = results.len() as f64;
    let column_mean =
        |f: &dyn Fn(&ReplicationResult) -> f64| results.iter().map(f).sum::<f64>() / m;
    let mean_msse_new = (0..p).map(|j| column_mean(&|r| r.msse_new[j])).collect();
    let mean_msse_classical = (0..p)
        .map(|j| column_mean(&|r| r.msse_classical[j]))
        .collect();
    let component_win_fraction = (0..p)
        .map(|j| column_mean(&|r| f64::from(u8::from(r.msse_new[j] <= r.msse_classical[j]))))
        .collect();
    let win_fraction = column_mean(&|r| f64::from(u8::from(r.new_wins())));

    Ok(ExperimentSummary {
        mean_missing_corr_new: mean_of(results.iter().filter_map(|r| r.missing_corr_new)),
        mean_missing_corr_classical: mean_of(
            results.iter().filter_map(|r| r.missing_corr_classical),
        ),
        replications: results,
        mean_msse_new,
        mean_msse_classical,
        win_fraction,
        component_win_fraction,
    })
}
