//! TOML run configuration.
//!
//! ```toml
//! [model]
//! kind = "local-level"   # or "general" with d, r, F, G, V
//! p = 2
//! W = 0.05               # or: discount = 0.95
//!
//! [prior]
//! P0 = 1e6               # scalars expand to multiples of the identity
//! N0 = [1.0, 1.0]
//!
//! [io]
//! data = "series.csv"
//! mode = "both"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use mvdlm::dlm::Schedule;
use mvdlm::simulate::{ExperimentSetup, LocalLevelConfig, MissingPattern};
use mvdlm::{
    DiagMatrix, EvolutionNoise, Matrix, ModelSpec, NmiwState, SpdMatrix, SymMatrix, UpdateMode,
};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// A literal matrix as a list of rows, or a scalar meaning a multiple of the
/// identity (square matrices) or a constant fill (otherwise).
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixValue {
    Scalar(f64),
    Rows(Vec<Vec<f64>>),
}

impl MatrixValue {
    fn resolve(&self, field: &str, rows: usize, cols: usize) -> CliResult<Matrix> {
        match self {
            MatrixValue::Scalar(x) if rows == cols => {
                Ok(Matrix::from_fn(
                    rows,
                    cols,
                    |i, j| if i == j { *x } else { 0.0 },
                ))
            }
            MatrixValue::Scalar(x) => Ok(Matrix::from_fn(rows, cols, |_, _| *x)),
            MatrixValue::Rows(data) => {
                let m = Matrix::from_rows(data)
                    .map_err(|e| CliError::config(format!("{field}: {e}")))?;
                if m.shape() != (rows, cols) {
                    return Err(CliError::config(format!(
                        "{field}: expected {rows}x{cols}, found {}x{}",
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(m)
            }
        }
    }

    fn resolve_sym(&self, field: &str, n: usize) -> CliResult<SymMatrix> {
        let m = self.resolve(field, n, n)?;
        SymMatrix::new(m).map_err(|e| CliError::config(format!("{field}: {e}")))
    }

    fn resolve_spd(&self, field: &str, n: usize) -> CliResult<SpdMatrix> {
        SpdMatrix::new(self.resolve_sym(field, n)?)
            .map_err(|e| CliError::config(format!("{field}: {e}")))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: Option<String>,
    pub p: usize,
    pub d: Option<usize>,
    pub r: Option<usize>,
    #[serde(rename = "F")]
    pub design: Option<MatrixValue>,
    #[serde(rename = "G")]
    pub evolution: Option<MatrixValue>,
    #[serde(rename = "V")]
    pub obs_cov: Option<MatrixValue>,
    #[serde(rename = "W")]
    pub noise_cov: Option<MatrixValue>,
    pub discount: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorBlock {
    pub m0: Option<MatrixValue>,
    #[serde(rename = "P0")]
    pub p0: Option<MatrixValue>,
    #[serde(rename = "S0")]
    pub s0: Option<MatrixValue>,
    #[serde(rename = "N0")]
    pub n0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoBlock {
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MissingEntry {
    pub t: usize,
    pub vars: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    #[serde(rename = "T", default = "default_len")]
    pub len: usize,
    #[serde(default = "default_corr")]
    pub corr: f64,
    #[serde(default = "default_obs_var")]
    pub obs_var: [f64; 2],
    #[serde(default = "default_level_var")]
    pub level_var: [f64; 2],
    #[serde(default = "default_initial_var")]
    pub initial_var: [f64; 2],
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Absent means the reference gap pattern; an empty list means none.
    pub missing: Option<Vec<MissingEntry>>,
}

fn default_len() -> usize {
    LocalLevelConfig::default().len
}
fn default_corr() -> f64 {
    LocalLevelConfig::default().corr
}
fn default_obs_var() -> [f64; 2] {
    LocalLevelConfig::default().obs_var
}
fn default_level_var() -> [f64; 2] {
    LocalLevelConfig::default().level_var
}
fn default_initial_var() -> [f64; 2] {
    LocalLevelConfig::default().initial_var
}
fn default_replications() -> usize {
    100
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelBlock>,
    #[serde(default)]
    pub prior: PriorBlock,
    #[serde(default)]
    pub io: IoBlock,
    pub simulate: Option<SimulateBlock>,
}

/// Which recursions a `filter` run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSelection {
    Single(UpdateMode),
    Both,
}

impl ModeSelection {
    pub fn parse(s: &str) -> CliResult<Self> {
        if s.eq_ignore_ascii_case("both") {
            return Ok(ModeSelection::Both);
        }
        s.parse::<UpdateMode>()
            .map(ModeSelection::Single)
            .map_err(|_| {
                CliError::config(format!(
                    "io.mode: expected new, classical or both, got '{s}'"
                ))
            })
    }

    pub fn modes(self) -> Vec<UpdateMode> {
        match self {
            ModeSelection::Single(m) => vec![m],
            ModeSelection::Both => vec![UpdateMode::New, UpdateMode::Classical],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string().trim_end().to_string()))
    }

    pub fn mode(&self) -> CliResult<ModeSelection> {
        self.io
            .mode
            .as_deref()
            .map_or(Ok(ModeSelection::Both), ModeSelection::parse)
    }

    pub fn model_block(&self) -> CliResult<&ModelBlock> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::config("missing [model] block"))
    }

    pub fn model(&self) -> CliResult<ModelSpec> {
        build_model(self.model_block()?)
    }

    pub fn prior(&self, model: &ModelSpec) -> CliResult<NmiwState> {
        build_prior(&self.prior, model.state_dim(), model.obs_dim())
    }

    pub fn simulate_block(&self) -> CliResult<&SimulateBlock> {
        self.simulate
            .as_ref()
            .ok_or_else(|| CliError::config("missing [simulate] block"))
    }

    /// Generator settings, gap pattern and fitted model for `simulate`.
    /// Without a `[model]` block the fitted model is a bivariate local level
    /// with `W` equal to the mean level variance.
    pub fn experiment(&self) -> CliResult<(LocalLevelConfig, MissingPattern, ExperimentSetup)> {
        let sim = self.simulate_block()?;
        let cfg = LocalLevelConfig {
            len: sim.len,
            corr: sim.corr,
            obs_var: sim.obs_var,
            level_var: sim.level_var,
            initial_var: sim.initial_var,
            seed: sim.seed,
        };
        cfg.validate()
            .map_err(|e| CliError::config(format!("simulate: {e}")))?;
        if sim.replications == 0 {
            return Err(CliError::config(
                "simulate.replications: must be at least 1",
            ));
        }
        let pattern = match &sim.missing {
            None => MissingPattern::reference(),
            Some(entries) => {
                MissingPattern::new(entries.iter().map(|e| (e.t, e.vars.clone())).collect())
            }
        };
        pattern
            .validate(cfg.len, 2)
            .map_err(|e| CliError::config(format!("simulate.missing: {e}")))?;

        let model = match &self.model {
            Some(block) => build_model(block)?,
            None => {
                let w = 0.5 * (sim.level_var[0] + sim.level_var[1]);
                let noise = EvolutionNoise::Explicit(Schedule::Constant(scalar_sym(w)));
                ModelSpec::local_level(2, noise)
                    .map_err(|e| CliError::config(format!("model: {e}")))?
            }
        };
        if (model.state_dim(), model.obs_dim(), model.replicates()) != (1, 2, 1) {
            return Err(CliError::config(
                "model: simulate needs a local-level model with d = 1, p = 2, r = 1",
            ));
        }
        let prior = self.prior(&model)?;
        Ok((cfg, pattern, ExperimentSetup { model, prior }))
    }
}

fn scalar_sym(x: f64) -> SymMatrix {
    SymMatrix::identity(1).scale(x)
}

fn build_model(block: &ModelBlock) -> CliResult<ModelSpec> {
    let p = block.p;
    if p == 0 {
        return Err(CliError::config("model.p: must be at least 1"));
    }
    let kind = block.kind.as_deref().unwrap_or("general");
    let (d, f, g, v) = match kind {
        "local-level" => {
            if block.design.is_some() || block.evolution.is_some() || block.obs_cov.is_some() {
                return Err(CliError::config(
                    "model: F, G and V are fixed for kind = \"local-level\"",
                ));
            }
            if block.d.is_some_and(|d| d != 1) || block.r.is_some_and(|r| r != 1) {
                return Err(CliError::config(
                    "model: local-level requires d = 1 and r = 1",
                ));
            }
            (
                1,
                Matrix::identity(1),
                Matrix::identity(1),
                SpdMatrix::identity(1),
            )
        }
        "general" => {
            let d = block
                .d
                .ok_or_else(|| CliError::config("model.d: required for kind = \"general\""))?;
            let r = block.r.unwrap_or(1);
            if d == 0 || r == 0 {
                return Err(CliError::config("model: d and r must be at least 1"));
            }
            let need = |m: &Option<MatrixValue>, name: &str| {
                m.clone().ok_or_else(|| {
                    CliError::config(format!("model.{name}: required for kind = \"general\""))
                })
            };
            let f = need(&block.design, "F")?.resolve("model.F", d, r)?;
            let g = need(&block.evolution, "G")?.resolve("model.G", d, d)?;
            let v = need(&block.obs_cov, "V")?.resolve_spd("model.V", r)?;
            (d, f, g, v)
        }
        other => {
            return Err(CliError::config(format!(
                "model.kind: unknown kind '{other}'"
            )))
        }
    };
    let noise = match (&block.noise_cov, block.discount) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "model: give either W or discount, not both",
            ))
        }
        (None, None) => return Err(CliError::config("model: one of W or discount is required")),
        (Some(w), None) => {
            EvolutionNoise::Explicit(Schedule::Constant(w.resolve_sym("model.W", d)?))
        }
        (None, Some(delta)) => EvolutionNoise::Discount(delta),
    };
    ModelSpec::new(
        p,
        Schedule::Constant(f),
        Schedule::Constant(g),
        Schedule::Constant(v),
        noise,
    )
    .map_err(|e| CliError::config(format!("model: {e}")))
}

fn build_prior(block: &PriorBlock, d: usize, p: usize) -> CliResult<NmiwState> {
    let m0 = match &block.m0 {
        Some(m) => m.resolve("prior.m0", d, p)?,
        None => Matrix::zeros(d, p),
    };
    let p0 = block
        .p0
        .clone()
        .unwrap_or(MatrixValue::Scalar(1e6))
        .resolve_sym("prior.P0", d)?;
    let s0 = block
        .s0
        .clone()
        .unwrap_or(MatrixValue::Scalar(1.0))
        .resolve_spd("prior.S0", p)?;
    let n0 = block.n0.clone().unwrap_or_else(|| vec![1.0; p]);
    if n0.len() != p {
        return Err(CliError::config(format!(
            "prior.N0: expected {p} entries, found {}",
            n0.len()
        )));
    }
    NmiwState::prior(m0, p0, s0, DiagMatrix::new(n0))
        .map_err(|e| CliError::config(format!("prior: {e}")))
}
