use super::masks::{build_masks, MaskSet, MaskedObservation};
use super::model::{NmiwState, StatePrior};
use crate::distributions::{MiwParams, MtParams};
use crate::error::{Error, Result};
use crate::linalg::{symmetrize, Matrix, SpdMatrix, SymMatrix};
use crate::scalar::Scalar;

/// Prior at `t`: `a = G m`, `R = G P Gᵀ + W` (symmetrized).
pub fn evolve<T: Scalar>(
    state: &NmiwState<T>,
    g: &Matrix<T>,
    w: &SymMatrix<T>,
) -> Result<StatePrior<T>> {
    let d = state.state_dim();
    if g.shape() != (d, d) {
        return Err(Error::dims(
            "evolve G",
            format!("{d}x{d}"),
            format!("{}x{}", g.rows(), g.cols()),
        ));
    }
    if w.dim() != d {
        return Err(Error::dims("evolve W", d, w.dim()));
    }
    let a = g.matmul(&state.mean)?;
    let gpg = g.matmul(state.cov.as_matrix())?.matmul(&g.transpose())?;
    let r = symmetrize(&gpg.add(w.as_matrix())?)?;
    Ok(StatePrior {
        a,
        r,
        miw: state.miw.clone(),
    })
}

/// Discount-factor evolution noise `W = (1 - δ)/δ · G P Gᵀ`, so that
/// `R = G P Gᵀ / δ`.
pub fn discount_noise<T: Scalar>(
    p: &SymMatrix<T>,
    g: &Matrix<T>,
    delta: T,
) -> Result<SymMatrix<T>> {
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::Domain(format!(
            "discount factor {delta} outside (0, 1]"
        )));
    }
    if g.cols() != p.dim() || !g.is_square() {
        return Err(Error::dims(
            "discount_noise G",
            format!("{0}x{0}", p.dim()),
            format!("{}x{}", g.rows(), g.cols()),
        ));
    }
    let gpg = symmetrize(&g.matmul(p.as_matrix())?.matmul(&g.transpose())?)?;
    Ok(gpg.scale((T::one() - delta) / delta))
}

/// One-step forecast `y_tᵀ | y^{t-1} ~ MT(f, Q, S, N, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult<T> {
    /// `r x p` forecast location `Fᵀ a`.
    pub f: Matrix<T>,
    /// `Q = Fᵀ R F + V`.
    pub q: SpdMatrix<T>,
    /// `d x r` gain `A = R F Q⁻¹`.
    pub gain: Matrix<T>,
    pub marginal: MtParams<T>,
}

impl<T: Scalar> ForecastResult<T> {
    /// `e = Y - f` with missing entries set to zero.
    pub fn residual(&self, obs: &MaskedObservation<T>) -> Result<Matrix<T>> {
        if (obs.replicates(), obs.dim()) != self.f.shape() {
            return Err(Error::dims(
                "residual",
                format!("{}x{}", self.f.rows(), self.f.cols()),
                format!("{}x{}", obs.replicates(), obs.dim()),
            ));
        }
        obs.filled_with(&self.f).sub(&self.f)
    }
}

pub fn forecast<T: Scalar>(
    prior: &StatePrior<T>,
    design: &Matrix<T>,
    obs_cov: &SpdMatrix<T>,
) -> Result<ForecastResult<T>> {
    let d = prior.a.rows();
    if design.rows() != d {
        return Err(Error::dims(
            "forecast F",
            format!("{d} rows"),
            format!("{} rows", design.rows()),
        ));
    }
    if obs_cov.dim() != design.cols() {
        return Err(Error::dims("forecast V", design.cols(), obs_cov.dim()));
    }
    let ft = design.transpose();
    let f = ft.matmul(&prior.a)?;
    let ftr = ft.matmul(prior.r.as_matrix())?;
    let q = SpdMatrix::new(symmetrize(&ftr.matmul(design)?.add(obs_cov.as_matrix())?)?)?;
    // A = R F Q⁻¹ = (Q⁻¹ Fᵀ R)ᵀ
    let gain = q.solve(&ftr)?.transpose();
    let marginal = MtParams::new(f.clone(), q.clone(), prior.miw.clone())?;
    Ok(ForecastResult {
        f,
        q,
        gain,
        marginal,
    })
}

/// Masked posterior recursion shared by every update variant:
/// `m = a + A e U×`, `P = R - A Q Aᵀ u`, `N⁺ = N + U+`,
/// `N⁺^{1/2} S⁺ N⁺^{1/2} = N^{1/2} S N^{1/2} + U× eᵀ Q⁻¹ e U×`.
fn apply_update<T: Scalar>(
    prior: &StatePrior<T>,
    fc: &ForecastResult<T>,
    resid: &Matrix<T>,
    masks: &MaskSet<T>,
) -> Result<NmiwState<T>> {
    let masked = masks.product.right_scale(resid)?;

    let mean = if masks.product.is_zero() {
        prior.a.clone()
    } else {
        prior.a.add(&fc.gain.matmul(&masked)?)?
    };

    let cov = if masks.fraction == T::zero() {
        prior.r.clone()
    } else {
        let aqa = fc
            .gain
            .matmul(fc.q.as_matrix())?
            .matmul(&fc.gain.transpose())?;
        symmetrize(&prior.r.as_matrix().sub(&aqa.scale(masks.fraction))?)?
    };

    let miw = if masks.sum.is_zero() && masks.product.is_zero() {
        prior.miw.clone()
    } else {
        let dof = prior.miw.dof().add(&masks.sum)?;
        let kernel = prior
            .miw
            .scaled_scale()
            .add(&fc.q.quadratic_form(&masked)?)?;
        let scale = crate::distributions::rescale_scaled_scale(&kernel, &dof)?;
        MiwParams::new(scale, dof, prior.miw.v())?
    };

    Ok(NmiwState { mean, cov, miw })
}

/// Posterior for a fully observed `r x p` observation.
pub fn update_full<T: Scalar>(
    prior: &StatePrior<T>,
    fc: &ForecastResult<T>,
    y: &Matrix<T>,
) -> Result<NmiwState<T>> {
    if y.shape() != fc.f.shape() {
        return Err(Error::dims(
            "update_full",
            format!("{}x{}", fc.f.rows(), fc.f.cols()),
            format!("{}x{}", y.rows(), y.cols()),
        ));
    }
    let resid = y.sub(&fc.f)?;
    apply_update(prior, fc, &resid, &MaskSet::full(y.rows(), y.cols()))
}

/// Posterior using only the observed entries. A fully missing observation
/// returns the prior unchanged.
pub fn update_missing<T: Scalar>(
    prior: &StatePrior<T>,
    fc: &ForecastResult<T>,
    obs: &MaskedObservation<T>,
) -> Result<NmiwState<T>> {
    let resid = fc.residual(obs)?;
    if obs.all_missing() {
        return Ok(prior.clone().into_state());
    }
    apply_update(prior, fc, &resid, &build_masks(obs))
}

/// All-or-nothing recursion: any missing entry returns the prior unchanged.
pub fn update_classical<T: Scalar>(
    prior: &StatePrior<T>,
    fc: &ForecastResult<T>,
    obs: &MaskedObservation<T>,
) -> Result<NmiwState<T>> {
    let resid = fc.residual(obs)?;
    if !obs.all_observed() {
        return Ok(prior.clone().into_state());
    }
    apply_update(
        prior,
        fc,
        &resid,
        &MaskSet::full(obs.replicates(), obs.dim()),
    )
}
