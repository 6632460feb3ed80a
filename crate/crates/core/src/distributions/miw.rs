use crate::error::{Error, Result};
use crate::linalg::{symmetrize, DiagMatrix, Matrix, SpdMatrix, SymMatrix};
use crate::scalar::Scalar;
use crate::special::{ln_gamma, ln_mvgamma};

/// Parameters `(S, N, v)` of a modified inverted Wishart law on `p x p`
/// covariance matrices.
///
/// `S` is the scale matrix, `N = diag(n_1, …, n_p)` carries one degree of
/// freedom per variable and `v` is a scalar hyperparameter. The law is the
/// inverted Wishart law with parameter `R = N^{1/2} S N^{1/2}` and
/// exponent `k = 2v + tr(N)/p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MiwParams<T> {
    scale: SpdMatrix<T>,
    dof: DiagMatrix<T>,
    v: T,
}

impl<T: Scalar> MiwParams<T> {
    pub fn new(scale: SpdMatrix<T>, dof: DiagMatrix<T>, v: T) -> Result<Self> {
        let p = scale.dim();
        if p == 0 {
            return Err(Error::Domain("MIW dimension must be positive".into()));
        }
        if dof.dim() != p {
            return Err(Error::dims("MiwParams::new (N)", p, dof.dim()));
        }
        if let Some(n) = dof
            .as_slice()
            .iter()
            .find(|&&n| !(n > T::zero() && n.is_finite()))
        {
            return Err(Error::Domain(format!(
                "degrees of freedom must be positive and finite, got {n}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::Domain(format!("v must be finite, got {v}")));
        }
        let params = Self { scale, dof, v };
        let k = params.k();
        if !(k > T::count(2 * p)) {
            return Err(Error::Domain(format!(
                "MIW not normalizable: k = 2v + tr(N)/p = {k} must exceed 2p = {}",
                2 * p
            )));
        }
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.scale.dim()
    }

    pub fn scale(&self) -> &SpdMatrix<T> {
        &self.scale
    }

    pub fn dof(&self) -> &DiagMatrix<T> {
        &self.dof
    }

    pub fn v(&self) -> T {
        self.v
    }

    /// `tr(N)/p`, the average degrees of freedom.
    pub fn mean_dof(&self) -> T {
        self.dof.trace() / T::count(self.dim())
    }

    /// `k = 2v + tr(N)/p`.
    pub fn k(&self) -> T {
        T::lit(2.0) * self.v + self.mean_dof()
    }

    /// `N^{1/2} S N^{1/2}`.
    pub fn scaled_scale(&self) -> SymMatrix<T> {
        self.scale
            .as_sym()
            .diag_sandwich(&self.dof.sqrt())
            .expect("dimensions checked at construction")
    }
}

/// Maps `(S, N, v)` to the inverted Wishart parameters `(R, k)`.
pub fn miw_to_iw<T: Scalar>(params: &MiwParams<T>) -> Result<(SpdMatrix<T>, T)> {
    Ok((SpdMatrix::new(params.scaled_scale())?, params.k()))
}

/// Inverse of [`miw_to_iw`] for a given `N`:
/// `S = N^{-1/2} R N^{-1/2}`, `v = (k - tr(N)/p) / 2`.
pub fn iw_to_miw<T: Scalar>(r: &SpdMatrix<T>, k: T, dof: DiagMatrix<T>) -> Result<MiwParams<T>> {
    let inv_sqrt = DiagMatrix::new(dof.as_slice().iter().map(|n| n.sqrt().recip()).collect());
    let s = r.as_sym().diag_sandwich(&inv_sqrt)?;
    let p = T::count(r.dim());
    let v = (k - dof.trace() / p) * T::lit(0.5);
    MiwParams::new(SpdMatrix::new(s)?, dof, v)
}

/// Log-density of the inverted Wishart law
/// `c |R|^{(k-p-1)/2} |Σ|^{-k/2} etr(-R Σ⁻¹ / 2)`
/// with `c⁻¹ = 2^{(k-p-1)p/2} Γ_p((k-p-1)/2)`.
pub fn iw_log_density<T: Scalar>(sigma: &SpdMatrix<T>, r: &SpdMatrix<T>, k: T) -> Result<T> {
    let p = r.dim();
    if sigma.dim() != p {
        return Err(Error::dims("iw_log_density", p, sigma.dim()));
    }
    if !(k > T::count(2 * p)) {
        return Err(Error::Domain(format!(
            "IW exponent k = {k} must exceed 2p = {}",
            2 * p
        )));
    }
    let half = T::lit(0.5);
    let pf = T::count(p);
    let a = (k - pf - T::one()) * half;
    let log_c = -(a * pf) * T::LN_2() - ln_mvgamma(p, a)?;
    let tr = sigma.trace_solve(r.as_matrix())?;
    Ok(log_c + a * r.log_det() - k * half * sigma.log_det() - half * tr)
}

/// Log-density of `Σ ~ MIW_p(S, N, v)`:
/// `c |Σ|^{-(v + tr(N)/(2p))} etr(-N^{1/2} S N^{1/2} Σ⁻¹ / 2)`.
///
/// The constant is assembled from `|S|` and `Π n_j` directly rather than
/// by routing through [`iw_log_density`].
pub fn miw_log_density<T: Scalar>(sigma: &SpdMatrix<T>, params: &MiwParams<T>) -> Result<T> {
    let p = params.dim();
    if sigma.dim() != p {
        return Err(Error::dims("miw_log_density", p, sigma.dim()));
    }
    let half = T::lit(0.5);
    let pf = T::count(p);
    let a = (params.k() - pf - T::one()) * half;
    let log_c0 = -(a * pf) * T::LN_2() - ln_mvgamma(p, a)?;
    let log_prod_n: T = params.dof.as_slice().iter().map(|n| n.ln()).sum();
    let log_c = log_c0 + a * (params.scale.log_det() + log_prod_n);
    let exponent = params.v + params.mean_dof() * half;
    let tr = sigma.trace_solve(params.scaled_scale().as_matrix())?;
    Ok(log_c - exponent * sigma.log_det() - half * tr)
}

/// `E(Σ) = N^{1/2} S N^{1/2} / (tr(N)/p + 2v - 2p - 2)`.
pub fn miw_mean<T: Scalar>(params: &MiwParams<T>) -> Result<SymMatrix<T>> {
    let p = T::count(params.dim());
    let two = T::lit(2.0);
    let denom = params.mean_dof() + two * params.v - two * p - two;
    if !(denom > T::zero()) {
        return Err(Error::MeanUndefined {
            denominator: denom.as_f64(),
        });
    }
    Ok(params.scaled_scale().scale(denom.recip()))
}

/// Law of the leading `q x q` block `Σ₁₁`: `MIW_q(S₁₁, N₁, v₁)` with
/// `v₁ = v - p + q + tr(N)/(2p) - tr(N₁)/(2q)`.
///
/// `q == p` returns the parameters unchanged.
pub fn miw_marginal_block<T: Scalar>(params: &MiwParams<T>, q: usize) -> Result<MiwParams<T>> {
    let p = params.dim();
    if q == 0 || q > p {
        return Err(Error::Domain(format!("block size q = {q} outside 1..={p}")));
    }
    if q == p {
        return Ok(params.clone());
    }
    let half = T::lit(0.5);
    let dof1 = DiagMatrix::new(params.dof.as_slice()[..q].to_vec());
    let v1 = params.v - T::count(p) + T::count(q) + params.mean_dof() * half
        - dof1.trace() / T::count(q) * half;
    let s11 = SpdMatrix::new(params.scale.as_sym().leading_block(q))?;
    MiwParams::new(s11, dof1, v1)
}

/// Inverted-gamma law with density `b^a / Γ(a) x^{-a-1} e^{-b/x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IgParams<T> {
    pub shape: T,
    pub scale: T,
}

impl<T: Scalar> IgParams<T> {
    pub fn new(shape: T, scale: T) -> Result<Self> {
        if !(shape > T::zero()) || !(scale > T::zero()) {
            return Err(Error::Domain(format!(
                "inverted gamma needs positive shape and scale, got ({shape}, {scale})"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn ln_pdf(&self, x: T) -> T {
        if !(x > T::zero()) {
            return T::neg_infinity();
        }
        let a = self.shape;
        a * self.scale.ln() - ln_gamma(a) - (a + T::one()) * x.ln() - self.scale / x
    }

    /// `b / (a - 1)`, defined for `a > 1`.
    pub fn mean(&self) -> Option<T> {
        (self.shape > T::one()).then(|| self.scale / (self.shape - T::one()))
    }
}

/// Marginal law of the diagonal entry `σ_ii` (0-based `i`):
/// `IG(v_i + n_i/2 - 1, n_i s_ii / 2)` with
/// `v_i = v - p + 1 + tr(N)/(2p) - n_i/2`.
pub fn diag_marginal_ig<T: Scalar>(params: &MiwParams<T>, i: usize) -> Result<IgParams<T>> {
    let p = params.dim();
    if i >= p {
        return Err(Error::Domain(format!("index {i} outside 0..{p}")));
    }
    let half = T::lit(0.5);
    let n_i = params.dof[i];
    let v_i = params.v - T::count(p) + T::one() + params.mean_dof() * half - n_i * half;
    let shape = v_i + n_i * half - T::one();
    let scale = n_i * params.scale.as_sym()[(i, i)] * half;
    if !(shape > T::zero()) {
        return Err(Error::Domain(format!(
            "marginal of sigma_{i}{i} has non-positive shape {shape}"
        )));
    }
    IgParams::new(shape, scale)
}

/// Conditional law of `Σ` given `Y | Σ ~ N_{r x p}(m, P, Σ)`:
/// `N* = N + r I_p` and
/// `N*^{1/2} S* N*^{1/2} = (Y - m)ᵀ P⁻¹ (Y - m) + N^{1/2} S N^{1/2}`; `v` is kept.
pub fn miw_conditional_update<T: Scalar>(
    m: &Matrix<T>,
    row_cov: &SpdMatrix<T>,
    params: &MiwParams<T>,
    y: &Matrix<T>,
) -> Result<MiwParams<T>> {
    let (r, p) = y.shape();
    if m.shape() != (r, p) {
        return Err(Error::dims(
            "miw_conditional_update (m)",
            format!("{r}x{p}"),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    if row_cov.dim() != r {
        return Err(Error::dims("miw_conditional_update (P)", r, row_cov.dim()));
    }
    if params.dim() != p {
        return Err(Error::dims("miw_conditional_update (S)", p, params.dim()));
    }
    let resid = y.sub(m)?;
    let quad = row_cov.quadratic_form(&resid)?;
    let post_dof = params.dof.add(&DiagMatrix::filled(p, T::count(r)))?;
    let scale = rescale_scaled_scale(&params.scaled_scale().add(&quad)?, &post_dof)?;
    MiwParams::new(scale, post_dof, params.v)
}

/// Recovers `S` from `X = N^{1/2} S N^{1/2}`, re-symmetrized.
pub(crate) fn rescale_scaled_scale<T: Scalar>(
    x: &SymMatrix<T>,
    dof: &DiagMatrix<T>,
) -> Result<SpdMatrix<T>> {
    let sqrt_n: Vec<T> = dof.as_slice().iter().map(|n| n.sqrt()).collect();
    let p = x.dim();
    let s = Matrix::from_fn(p, p, |i, j| x[(i, j)] / (sqrt_n[i] * sqrt_n[j]));
    SpdMatrix::new(symmetrize(&s)?)
}
