use super::filter::FilterOutput;
use super::model::NmiwState;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean square standardized one-step forecast error per variable.
///
/// Component `j` averages `e_kj² / (Q_kk s_jj)` over every observed entry
/// of variable `j`, with `s_jj` from the previous posterior.
pub fn msse<T: Scalar>(output: &FilterOutput<T>) -> Result<Vec<T>> {
    let p = output
        .steps
        .first()
        .map(|s| s.observation.dim())
        .ok_or_else(|| Error::Domain("empty filter output".into()))?;
    let mut sums = vec![T::zero(); p];
    let mut counts = vec![0usize; p];
    for step in &output.steps {
        for (idx, z) in step.standardized.iter().enumerate() {
            if let Some(z) = z {
                sums[idx % p] += *z * *z;
                counts[idx % p] += 1;
            }
        }
    }
    sums.iter()
        .zip(&counts)
        .enumerate()
        .map(|(j, (&s, &c))| {
            if c == 0 {
                Err(Error::Domain(format!(
                    "variable {} is never observed",
                    j + 1
                )))
            } else {
                Ok(s / T::count(c))
            }
        })
        .collect()
}

/// `s_ij / sqrt(s_ii s_jj)` from the scale matrix of `state` (0-based indices).
pub fn correlation_estimate<T: Scalar>(state: &NmiwState<T>, i: usize, j: usize) -> Result<T> {
    let p = state.obs_dim();
    if i >= p || j >= p {
        return Err(Error::Domain(format!("indices ({i}, {j}) outside 0..{p}")));
    }
    if i == j {
        return Err(Error::Domain(
            "correlation needs two distinct variables".into(),
        ));
    }
    let s = state.miw.scale().as_matrix();
    let (sii, sjj) = (s[(i, i)], s[(j, j)]);
    if !(sii > T::zero() && sjj > T::zero()) {
        return Err(Error::Domain(format!(
            "non-positive diagonal in scale ({sii}, {sjj})"
        )));
    }
    Ok(s[(i, j)] / (sii * sjj).sqrt())
}

/// Posterior correlation estimates at partial-missing times, for every pair
/// with one variable observed and the other missing. Returns
/// `(t, i, j, correlation)` with 0-based `i < j`.
pub fn missing_time_correlations<T: Scalar>(
    output: &FilterOutput<T>,
) -> Result<Vec<(usize, usize, usize, T)>> {
    let mut out = Vec::new();
    for step in &output.steps {
        let obs = &step.observation;
        if !obs.is_partial() {
            continue;
        }
        let p = obs.dim();
        for i in 0..p {
            for j in (i + 1)..p {
                if obs.variable_missing(i) != obs.variable_missing(j) {
                    out.push((step.t, i, j, correlation_estimate(&step.posterior, i, j)?));
                }
            }
        }
    }
    Ok(out)
}
