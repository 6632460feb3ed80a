//! Log-gamma and log multivariate gamma functions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`, via the Lanczos approximation (g = 7, 9 terms).
///
/// Arguments below 1/2 go through the reflection formula. Non-positive
/// arguments return NaN.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    let half = T::lit(0.5);
    if x < half {
        // Γ(x) Γ(1 - x) = π / sin(πx), with sin(πx) > 0 on (0, 1/2)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let z = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (z + T::count(i));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (z + half) * t.ln() - t + acc.ln()
}

/// `ln Γ_p(a) = p(p-1)/4 · ln π + Σ_{j=1..p} ln Γ(a + (1 - j)/2)`.
///
/// Requires `a > (p - 1)/2`.
pub fn ln_mvgamma<T: Scalar>(p: usize, a: T) -> Result<T> {
    if p == 0 {
        return Err(Error::Domain("multivariate gamma needs p >= 1".into()));
    }
    let half = T::lit(0.5);
    if !(a > T::count(p - 1) * half) {
        return Err(Error::Domain(format!(
            "multivariate gamma of order {p} needs argument > {}, got {a}",
            (p - 1) as f64 / 2.0
        )));
    }
    let pf = T::count(p);
    let mut acc = pf * (pf - T::one()) * T::lit(0.25) * T::PI().ln();
    for j in 1..=p {
        acc += ln_gamma(a + (T::one() - T::count(j)) * half);
    }
    Ok(acc)
}
