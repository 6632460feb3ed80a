use crate::error::{Error, Result};
use crate::linalg::{DiagMatrix, Matrix};
use crate::scalar::Scalar;

/// An `r x p` observation (the transposed `y_tᵀ`) with per-entry
/// missing indicators. Missing slots hold zero and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedObservation<T> {
    values: Matrix<T>,
    observed: Vec<bool>,
}

impl<T: Scalar> MaskedObservation<T> {
    pub fn new(values: Matrix<T>, observed: Vec<bool>) -> Result<Self> {
        let (r, p) = values.shape();
        if observed.len() != r * p {
            return Err(Error::dims("MaskedObservation mask", r * p, observed.len()));
        }
        let mut values = values;
        for i in 0..r {
            for j in 0..p {
                if observed[i * p + j] {
                    if !values[(i, j)].is_finite() {
                        return Err(Error::Domain(format!(
                            "observed entry ({i}, {j}) is not finite"
                        )));
                    }
                } else {
                    values[(i, j)] = T::zero();
                }
            }
        }
        Ok(Self { values, observed })
    }

    pub fn fully_observed(values: Matrix<T>) -> Result<Self> {
        let n = values.rows() * values.cols();
        Self::new(values, vec![true; n])
    }

    /// Builds from rows of optional entries; `None` marks a missing value.
    pub fn from_options<R: AsRef<[Option<T>]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let p = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * p);
        let mut observed = Vec::with_capacity(r * p);
        for row in rows {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::dims("MaskedObservation::from_options", p, row.len()));
            }
            for x in row {
                data.push(x.unwrap_or_else(T::zero));
                observed.push(x.is_some());
            }
        }
        Self::new(Matrix::new(r, p, data)?, observed)
    }

    /// A 1 x p observation vector.
    pub fn vector(entries: &[Option<T>]) -> Result<Self> {
        Self::from_options(&[entries])
    }

    pub fn replicates(&self) -> usize {
        self.values.rows()
    }

    pub fn dim(&self) -> usize {
        self.values.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.is_observed(i, j).then(|| self.values[(i, j)])
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[i * self.dim() + j]
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&b| b).count()
    }

    pub fn all_observed(&self) -> bool {
        self.observed.iter().all(|&b| b)
    }

    pub fn all_missing(&self) -> bool {
        self.observed.iter().all(|&b| !b)
    }

    /// Some but not all entries missing.
    pub fn is_partial(&self) -> bool {
        !self.all_observed() && !self.all_missing()
    }

    /// Variable `j` has at least one missing replicate.
    pub fn variable_missing(&self, j: usize) -> bool {
        (0..self.replicates()).any(|i| !self.is_observed(i, j))
    }

    /// Values with missing entries replaced by `fill` (entrywise).
    pub fn filled_with(&self, fill: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.replicates(), self.dim(), |i, j| {
            if self.is_observed(i, j) {
                self.values[(i, j)]
            } else {
                fill[(i, j)]
            }
        })
    }
}

/// Diagonal 0/1 masks derived from an observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet<T> {
    /// `U_k` for each replicate row `k`.
    pub per_replicate: Vec<DiagMatrix<T>>,
    /// `Π_k U_k`.
    pub product: DiagMatrix<T>,
    /// `Σ_k U_k`.
    pub sum: DiagMatrix<T>,
    /// `u = tr(Π_k U_k) / p`.
    pub fraction: T,
}

impl<T: Scalar> MaskSet<T> {
    /// Masks of a fully observed `r x p` observation.
    pub fn full(r: usize, p: usize) -> Self {
        Self {
            per_replicate: vec![DiagMatrix::identity(p); r],
            product: DiagMatrix::identity(p),
            sum: DiagMatrix::filled(p, T::count(r)),
            fraction: T::one(),
        }
    }

    /// Masks that discard the observation entirely.
    pub fn none(r: usize, p: usize) -> Self {
        Self {
            per_replicate: vec![DiagMatrix::zeros(p); r],
            product: DiagMatrix::zeros(p),
            sum: DiagMatrix::zeros(p),
            fraction: T::zero(),
        }
    }
}

pub fn build_masks<T: Scalar>(obs: &MaskedObservation<T>) -> MaskSet<T> {
    let (r, p) = (obs.replicates(), obs.dim());
    let indicator = |b: bool| if b { T::one() } else { T::zero() };
    let per_replicate: Vec<DiagMatrix<T>> = (0..r)
        .map(|k| DiagMatrix::new((0..p).map(|j| indicator(obs.is_observed(k, j))).collect()))
        .collect();
    let product = DiagMatrix::new(
        (0..p)
            .map(|j| indicator(!obs.variable_missing(j)))
            .collect(),
    );
    let sum = DiagMatrix::new(
        (0..p)
            .map(|j| T::count((0..r).filter(|&k| obs.is_observed(k, j)).count()))
            .collect(),
    );
    let fraction = product.trace() / T::count(p);
    MaskSet {
        per_replicate,
        product,
        sum,
        fraction,
    }
}
