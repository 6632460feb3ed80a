use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};
use crate::scalar::Scalar;

/// `Y ~ N_{r x p}(M, P, Σ)`, equivalently `vec(Y) ~ N_{rp}(vec(M), Σ ⊗ P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixNormalParams<T> {
    mean: Matrix<T>,
    row_cov: SpdMatrix<T>,
    col_cov: SpdMatrix<T>,
}

impl<T: Scalar> MatrixNormalParams<T> {
    pub fn new(mean: Matrix<T>, row_cov: SpdMatrix<T>, col_cov: SpdMatrix<T>) -> Result<Self> {
        let (r, p) = mean.shape();
        if row_cov.dim() != r {
            return Err(Error::dims(
                "MatrixNormalParams (row covariance)",
                r,
                row_cov.dim(),
            ));
        }
        if col_cov.dim() != p {
            return Err(Error::dims(
                "MatrixNormalParams (column covariance)",
                p,
                col_cov.dim(),
            ));
        }
        Ok(Self {
            mean,
            row_cov,
            col_cov,
        })
    }

    pub fn mean(&self) -> &Matrix<T> {
        &self.mean
    }

    /// `r x r` covariance among rows.
    pub fn row_cov(&self) -> &SpdMatrix<T> {
        &self.row_cov
    }

    /// `p x p` covariance among columns.
    pub fn col_cov(&self) -> &SpdMatrix<T> {
        &self.col_cov
    }
}

/// `-(rp/2) ln 2π - (p/2) ln|P| - (r/2) ln|Σ| - tr(Σ⁻¹ (Y-M)ᵀ P⁻¹ (Y-M)) / 2`.
pub fn matrix_normal_log_density<T: Scalar>(
    y: &Matrix<T>,
    params: &MatrixNormalParams<T>,
) -> Result<T> {
    if y.shape() != params.mean.shape() {
        return Err(Error::dims(
            "matrix_normal_log_density",
            format!("{}x{}", params.mean.rows(), params.mean.cols()),
            format!("{}x{}", y.rows(), y.cols()),
        ));
    }
    let (r, p) = y.shape();
    let half = T::lit(0.5);
    let (rf, pf) = (T::count(r), T::count(p));
    let resid = y.sub(&params.mean)?;
    let quad = params.row_cov.quadratic_form(&resid)?;
    let tr = params.col_cov.trace_solve(quad.as_matrix())?;
    Ok(-(rf * pf * half) * T::TAU().ln()
        - pf * half * params.row_cov.log_det()
        - rf * half * params.col_cov.log_det()
        - half * tr)
}
