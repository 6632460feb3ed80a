use std::fmt;
use std::str::FromStr;

use crate::distributions::MiwParams;
use crate::error::{Error, Result};
use crate::linalg::{DiagMatrix, Matrix, SpdMatrix, SymMatrix};
use crate::scalar::Scalar;

/// A per-time quantity: either constant or one value per time step.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule<M> {
    Constant(M),
    PerStep(Vec<M>),
}

impl<M> Schedule<M> {
    /// Value at 1-based time `t`.
    pub fn at(&self, t: usize) -> Option<&M> {
        match self {
            Schedule::Constant(m) => Some(m),
            Schedule::PerStep(v) => t.checked_sub(1).and_then(|i| v.get(i)),
        }
    }

    fn len(&self) -> Option<usize> {
        match self {
            Schedule::Constant(_) => None,
            Schedule::PerStep(v) => Some(v.len()),
        }
    }

    fn values(&self) -> Box<dyn Iterator<Item = &M> + '_> {
        match self {
            Schedule::Constant(m) => Box::new(std::iter::once(m)),
            Schedule::PerStep(v) => Box::new(v.iter()),
        }
    }
}

/// Evolution noise: explicit `W_t` or a single discount factor `δ` with
/// `R_t = G_t P_{t-1} G_tᵀ / δ`.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionNoise<T> {
    Explicit(Schedule<SymMatrix<T>>),
    Discount(T),
}

/// Model matrices `F_t` (d x r), `G_t` (d x d), `V_t` (r x r) and the
/// evolution noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec<T> {
    d: usize,
    p: usize,
    r: usize,
    design: Schedule<Matrix<T>>,
    evolution: Schedule<Matrix<T>>,
    obs_cov: Schedule<SpdMatrix<T>>,
    noise: EvolutionNoise<T>,
}

impl<T: Scalar> ModelSpec<T> {
    pub fn new(
        p: usize,
        design: Schedule<Matrix<T>>,
        evolution: Schedule<Matrix<T>>,
        obs_cov: Schedule<SpdMatrix<T>>,
        noise: EvolutionNoise<T>,
    ) -> Result<Self> {
        let first = design
            .values()
            .next()
            .ok_or_else(|| Error::Domain("design schedule is empty".into()))?;
        let (d, r) = first.shape();
        if d == 0 || r == 0 || p == 0 {
            return Err(Error::Domain("model dimensions must be positive".into()));
        }
        for f in design.values() {
            if f.shape() != (d, r) {
                return Err(Error::dims(
                    "ModelSpec F",
                    format!("{d}x{r}"),
                    format!("{}x{}", f.rows(), f.cols()),
                ));
            }
        }
        for g in evolution.values() {
            if g.shape() != (d, d) {
                return Err(Error::dims(
                    "ModelSpec G",
                    format!("{d}x{d}"),
                    format!("{}x{}", g.rows(), g.cols()),
                ));
            }
        }
        for v in obs_cov.values() {
            if v.dim() != r {
                return Err(Error::dims("ModelSpec V", r, v.dim()));
            }
        }
        match &noise {
            EvolutionNoise::Explicit(ws) => {
                for w in ws.values() {
                    if w.dim() != d {
                        return Err(Error::dims("ModelSpec W", d, w.dim()));
                    }
                }
            }
            EvolutionNoise::Discount(delta) => {
                if !(*delta > T::zero() && *delta <= T::one()) {
                    return Err(Error::Domain(format!(
                        "discount factor {delta} outside (0, 1]"
                    )));
                }
            }
        }
        Ok(Self {
            d,
            p,
            r,
            design,
            evolution,
            obs_cov,
            noise,
        })
    }

    /// Bivariate-style local level: `d = r = 1`, `F = G = V = 1`.
    pub fn local_level(p: usize, noise: EvolutionNoise<T>) -> Result<Self> {
        Self::new(
            p,
            Schedule::Constant(Matrix::identity(1)),
            Schedule::Constant(Matrix::identity(1)),
            Schedule::Constant(SpdMatrix::identity(1)),
            noise,
        )
    }

    pub fn state_dim(&self) -> usize {
        self.d
    }

    pub fn obs_dim(&self) -> usize {
        self.p
    }

    pub fn replicates(&self) -> usize {
        self.r
    }

    pub fn design(&self, t: usize) -> Result<&Matrix<T>> {
        self.design.at(t).ok_or_else(|| schedule_gap("F", t))
    }

    pub fn evolution(&self, t: usize) -> Result<&Matrix<T>> {
        self.evolution.at(t).ok_or_else(|| schedule_gap("G", t))
    }

    pub fn obs_cov(&self, t: usize) -> Result<&SpdMatrix<T>> {
        self.obs_cov.at(t).ok_or_else(|| schedule_gap("V", t))
    }

    pub fn noise(&self) -> &EvolutionNoise<T> {
        &self.noise
    }

    /// Checks every per-step schedule covers `len` time steps.
    pub(crate) fn check_horizon(&self, len: usize) -> Result<()> {
        let mut lens = vec![
            ("F", self.design.len()),
            ("G", self.evolution.len()),
            ("V", self.obs_cov.len()),
        ];
        if let EvolutionNoise::Explicit(w) = &self.noise {
            lens.push(("W", w.len()));
        }
        for (name, l) in lens {
            if let Some(l) = l {
                if l < len {
                    return Err(Error::Domain(format!(
                        "{name} schedule has {l} steps, data has {len}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn schedule_gap(name: &str, t: usize) -> Error {
    Error::Domain(format!("{name} schedule has no entry for time {t}"))
}

/// Joint normal / modified inverted Wishart state
/// `Θ, Σ ~ NMIW(m, P, S, N, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NmiwState<T> {
    /// `d x p` location of `Θ`.
    pub mean: Matrix<T>,
    /// `d x d` row covariance of `Θ` (positive semidefinite).
    pub cov: SymMatrix<T>,
    pub miw: MiwParams<T>,
}

impl<T: Scalar> NmiwState<T> {
    pub fn new(mean: Matrix<T>, cov: SymMatrix<T>, miw: MiwParams<T>) -> Result<Self> {
        let (d, p) = mean.shape();
        if cov.dim() != d {
            return Err(Error::dims("NmiwState P", d, cov.dim()));
        }
        if miw.dim() != p {
            return Err(Error::dims("NmiwState S", p, miw.dim()));
        }
        Ok(Self { mean, cov, miw })
    }

    /// Initial prior `Θ_0 | Σ ~ N(m_0, P_0, Σ)`, `Σ ~ MIW_p(S_0, N_0, p)`.
    pub fn prior(
        m0: Matrix<T>,
        p0: SymMatrix<T>,
        s0: SpdMatrix<T>,
        n0: DiagMatrix<T>,
    ) -> Result<Self> {
        let p = m0.cols();
        let miw = MiwParams::new(s0, n0, T::count(p))?;
        Self::new(m0, p0, miw)
    }

    pub fn state_dim(&self) -> usize {
        self.mean.rows()
    }

    pub fn obs_dim(&self) -> usize {
        self.mean.cols()
    }
}

/// One-step prior `(a_t, R_t)` together with the unchanged `(S, N, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePrior<T> {
    pub a: Matrix<T>,
    pub r: SymMatrix<T>,
    pub miw: MiwParams<T>,
}

impl<T: Scalar> StatePrior<T> {
    /// The prior viewed as a posterior with no information added.
    pub fn into_state(self) -> NmiwState<T> {
        NmiwState {
            mean: self.a,
            cov: self.r,
            miw: self.miw,
        }
    }
}

/// Which posterior recursions to run on observations with missing entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateMode {
    /// Masked updates: observed entries update their own variables.
    New,
    /// Any missing entry discards the whole observation.
    Classical,
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateMode::New => "new",
            UpdateMode::Classical => "classical",
        })
    }
}

impl FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "new" => Ok(UpdateMode::New),
            "classical" => Ok(UpdateMode::Classical),
            other => Err(Error::Domain(format!("unknown update mode '{other}'"))),
        }
    }
}
