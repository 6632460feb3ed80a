use super::MiwParams;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};
use crate::scalar::Scalar;
use crate::special::ln_mvgamma;

/// Modified matrix-t law `MT(f, Q, S, N, v)` of an `r x p` matrix: the
/// marginal of `Y | Σ ~ N_{r x p}(f, Q, Σ)` when `Σ ~ MIW_p(S, N, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MtParams<T> {
    location: Matrix<T>,
    row_scale: SpdMatrix<T>,
    miw: MiwParams<T>,
}

impl<T: Scalar> MtParams<T> {
    pub fn new(location: Matrix<T>, row_scale: SpdMatrix<T>, miw: MiwParams<T>) -> Result<Self> {
        let (r, p) = location.shape();
        if row_scale.dim() != r {
            return Err(Error::dims("MtParams (Q)", r, row_scale.dim()));
        }
        if miw.dim() != p {
            return Err(Error::dims("MtParams (S)", p, miw.dim()));
        }
        Ok(Self {
            location,
            row_scale,
            miw,
        })
    }

    pub fn location(&self) -> &Matrix<T> {
        &self.location
    }

    pub fn row_scale(&self) -> &SpdMatrix<T> {
        &self.row_scale
    }

    /// The `(S, N, v)` block shared with the covariance law.
    pub fn miw(&self) -> &MiwParams<T> {
        &self.miw
    }
}

/// Log-density `ln c - ((2v + tr(N)/p + r - p - 1)/2) ln|N^{1/2}SN^{1/2} + (Y-f)ᵀQ⁻¹(Y-f)|`
/// with
/// `c = Γ_p((k+r+p-1)/2) / (π^{rp/2} Γ_p((k+p-1)/2)) · (|S| Π n_j)^{(k+p-1)/2} |Q|^{-p/2}`
/// and `k = 2v - 2p + tr(N)/p`.
pub fn mt_log_density<T: Scalar>(y: &Matrix<T>, params: &MtParams<T>) -> Result<T> {
    if y.shape() != params.location.shape() {
        return Err(Error::dims(
            "mt_log_density",
            format!("{}x{}", params.location.rows(), params.location.cols()),
            format!("{}x{}", y.rows(), y.cols()),
        ));
    }
    let (r, p) = y.shape();
    let miw = &params.miw;
    let half = T::lit(0.5);
    let (rf, pf) = (T::count(r), T::count(p));
    let k = T::lit(2.0) * (miw.v() - pf) + miw.mean_dof();
    let a0 = (k + pf - T::one()) * half;
    let a1 = (k + rf + pf - T::one()) * half;
    let log_prod_n: T = miw.dof().as_slice().iter().map(|n| n.ln()).sum();
    let log_c = ln_mvgamma(p, a1)? - ln_mvgamma(p, a0)? - rf * pf * half * T::PI().ln()
        + a0 * (miw.scale().log_det() + log_prod_n)
        - pf * half * params.row_scale.log_det();

    let resid = y.sub(&params.location)?;
    let kernel = miw
        .scaled_scale()
        .add(&params.row_scale.quadratic_form(&resid)?)?;
    let kernel = SpdMatrix::new(kernel)?;
    Ok(log_c - a1 * kernel.log_det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DiagMatrix;

    #[test]
    fn symmetric_about_location() {
        let miw = MiwParams::new(
            SpdMatrix::from_matrix(&Matrix::from_rows(&[[1.0, 0.3], [0.3, 2.0]]).unwrap()).unwrap(),
            DiagMatrix::new(vec![3.0, 5.0]),
            2.0,
        )
        .unwrap();
        let f = Matrix::from_rows(&[[0.5, -1.0], [1.0, 0.0]]).unwrap();
        let params = MtParams::new(f.clone(), SpdMatrix::identity(2), miw).unwrap();
        let delta = Matrix::from_rows(&[[0.3, 0.7], [-1.1, 0.2]]).unwrap();
        let plus: f64 = mt_log_density(&f.add(&delta).unwrap(), &params).unwrap();
        let minus = mt_log_density(&f.sub(&delta).unwrap(), &params).unwrap();
        assert!((plus - minus).abs() < 1e-13);
    }
}
