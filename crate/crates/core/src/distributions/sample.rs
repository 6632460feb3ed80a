use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use super::{miw_to_iw, MatrixNormalParams, MiwParams};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};
use crate::scalar::Scalar;

fn std_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(StandardNormal.sample(rng))
}

/// Draws `Σ ~ MIW_p(S, N, v)` through the equivalent inverted Wishart law.
///
/// With `R = L Lᵀ` and `ν = k - p - 1`, a Bartlett factor `A` of a
/// `Wishart(I, ν)` draw gives `Σ = (L A⁻ᵀ)(L A⁻ᵀ)ᵀ`.
pub fn sample_miw<T: Scalar, R: Rng + ?Sized>(
    params: &MiwParams<T>,
    rng: &mut R,
) -> Result<SpdMatrix<T>> {
    let (r, k) = miw_to_iw(params)?;
    let p = r.dim();
    let nu = (k - T::count(p) - T::one()).as_f64();
    if !(nu > (p as f64) - 1.0) {
        return Err(Error::Domain(format!(
            "inverted Wishart sampler needs k > 2p, got k = {k}"
        )));
    }

    let mut a = Matrix::<T>::zeros(p, p);
    for i in 0..p {
        let chi = ChiSquared::new(nu - i as f64)
            .map_err(|e| Error::Domain(format!("chi-square parameter: {e}")))?;
        a[(i, i)] = T::lit(chi.sample(rng).sqrt());
        for j in 0..i {
            a[(i, j)] = std_normal(rng);
        }
    }

    // B = L A⁻ᵀ, i.e. A Bᵀ = Lᵀ solved by forward substitution
    let lt = r.factor().transpose();
    let mut bt = Matrix::<T>::zeros(p, p);
    for c in 0..p {
        for i in 0..p {
            let mut s = lt[(i, c)];
            for k in 0..i {
                s -= a[(i, k)] * bt[(k, c)];
            }
            bt[(i, c)] = s / a[(i, i)];
        }
    }
    let b = bt.transpose();
    SpdMatrix::from_matrix(&b.matmul(&bt)?)
}

/// Draws `Y = M + L_P Z L_Σᵀ` with `Z` iid standard normal.
pub fn sample_matrix_normal<T: Scalar, R: Rng + ?Sized>(
    params: &MatrixNormalParams<T>,
    rng: &mut R,
) -> Matrix<T> {
    let (r, p) = params.mean().shape();
    let z = Matrix::from_fn(r, p, |_, _| std_normal::<T, R>(rng));
    let lp = params.row_cov().factor();
    let ls = params.col_cov().factor();
    let noise = lp
        .matmul(&z)
        .and_then(|x| x.matmul(&ls.transpose()))
        .expect("dimensions checked at construction");
    params
        .mean()
        .add(&noise)
        .expect("dimensions checked at construction")
}
