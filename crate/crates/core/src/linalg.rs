//! Small dense matrix kernel: symmetric and positive-definite wrappers,
//! Cholesky factorization, triangular solves and log-determinants.
//!
//! Matrices are stored row-major. Every inverse appearing in the filter
//! formulas is realized as a pair of triangular solves against a cached
//! Cholesky factor; no explicit inverse is ever formed.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(
                "Matrix::new",
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from a slice of equal-length rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::dims(
                    "Matrix::from_rows",
                    format!("{ncols} columns"),
                    format!("{} columns in row {i}", row.len()),
                ));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds an `f64` literal matrix converted into `T`.
    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let converted: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| T::lit(x)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix<T>) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                "matmul",
                format!("rhs with {} rows", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        rhs: &Matrix<T>,
        context: &'static str,
        f: impl Fn(T, T) -> T,
    ) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(
                context,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Result<Self> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(
            T::zero(),
            |acc, &x| if x.abs() > acc { x.abs() } else { acc },
        )
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix<T>) -> Result<T> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Converts every entry into another scalar type.
    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

/// Square matrix whose entries satisfy `a[i][j] == a[j][i]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T>(Matrix<T>);

impl<T: Scalar> SymMatrix<T> {
    /// Accepts a matrix only if it is exactly symmetric.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims(
                "SymMatrix::new",
                "square",
                format!("{}x{}", m.rows, m.cols),
            ));
        }
        for i in 0..m.rows {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, rhs: &SymMatrix<T>) -> Result<Self> {
        Ok(Self(self.0.add(&rhs.0)?))
    }

    /// Extracts the leading `q x q` block.
    pub fn leading_block(&self, q: usize) -> Self {
        Self(Matrix::from_fn(q, q, |i, j| self.0[(i, j)]))
    }

    /// Conjugates by a diagonal matrix: `D A D`.
    pub fn diag_sandwich(&self, d: &DiagMatrix<T>) -> Result<Self> {
        if d.dim() != self.dim() {
            return Err(Error::dims("diag_sandwich", self.dim(), d.dim()));
        }
        let dd = d.as_slice();
        Ok(Self(Matrix::from_fn(self.dim(), self.dim(), |i, j| {
            dd[i] * self.0[(i, j)] * dd[j]
        })))
    }

    /// Factorizes after adding `ridge` to the diagonal.
    pub fn to_spd(&self, ridge: T) -> Result<SpdMatrix<T>> {
        SpdMatrix::with_ridge(self.clone(), ridge)
    }
}

impl<T> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &T {
        &self.0[idx]
    }
}

/// Returns `(A + Aᵀ) / 2`.
pub fn symmetrize<T: Scalar>(a: &Matrix<T>) -> Result<SymMatrix<T>> {
    if !a.is_square() {
        return Err(Error::dims(
            "symmetrize",
            "square",
            format!("{}x{}", a.rows, a.cols),
        ));
    }
    let half = T::lit(0.5);
    Ok(SymMatrix(Matrix::from_fn(a.rows, a.cols, |i, j| {
        if i == j {
            a[(i, i)]
        } else {
            (a[(i, j)] + a[(j, i)]) * half
        }
    })))
}

/// Lower Cholesky factor of `A + ridge·I`.
pub fn cholesky_lower<T: Scalar>(a: &SymMatrix<T>, ridge: T) -> Result<Matrix<T>> {
    let n = a.dim();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)] + ridge;
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        // NaN pivots fail this comparison as well
        if !(pivot > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: pivot.as_f64(),
            });
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Symmetric positive-definite matrix with its cached lower Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix<T> {
    sym: SymMatrix<T>,
    factor: Matrix<T>,
}

impl<T: Scalar> SpdMatrix<T> {
    pub fn new(sym: SymMatrix<T>) -> Result<Self> {
        Self::with_ridge(sym, T::zero())
    }

    /// Factorizes `sym + ridge·I`; the stored matrix includes the ridge.
    pub fn with_ridge(sym: SymMatrix<T>, ridge: T) -> Result<Self> {
        if ridge < T::zero() {
            return Err(Error::Domain(format!("ridge must be >= 0, got {ridge}")));
        }
        let factor = cholesky_lower(&sym, ridge)?;
        let sym = if ridge > T::zero() {
            let mut m = sym.into_matrix();
            for i in 0..m.rows {
                m[(i, i)] += ridge;
            }
            SymMatrix(m)
        } else {
            sym
        };
        Ok(Self { sym, factor })
    }

    /// Symmetrizes and factorizes a general square matrix.
    pub fn from_matrix(m: &Matrix<T>) -> Result<Self> {
        Self::new(symmetrize(m)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sym: SymMatrix::identity(n),
            factor: Matrix::identity(n),
        }
    }

    pub fn from_diag(d: &DiagMatrix<T>) -> Result<Self> {
        Self::new(d.to_sym())
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix<T> {
        &self.sym
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        self.sym.as_matrix()
    }

    /// Lower-triangular `L` with `L Lᵀ = A`.
    pub fn factor(&self) -> &Matrix<T> {
        &self.factor
    }

    /// Solves `A X = B` by forward and back substitution.
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        let n = self.dim();
        if b.rows != n {
            return Err(Error::dims(
                "spd_solve",
                format!("{n} rows"),
                format!("{} rows", b.rows),
            ));
        }
        let l = &self.factor;
        let mut x = b.clone();
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= l[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / l[(i, i)];
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= l[(k, i)] * x[(k, c)];
                }
                x[(i, c)] = s / l[(i, i)];
            }
        }
        Ok(x)
    }

    /// `log |A| = 2 Σ log L_ii`.
    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim()).map(|i| self.factor[(i, i)].ln()).sum::<T>() * two
    }

    /// `tr(A⁻¹ B)` for square `B`.
    pub fn trace_solve(&self, b: &Matrix<T>) -> Result<T> {
        Ok(self.solve(b)?.trace())
    }

    /// `Bᵀ A⁻¹ B`, symmetrized.
    pub fn quadratic_form(&self, b: &Matrix<T>) -> Result<SymMatrix<T>> {
        let z = self.solve(b)?;
        symmetrize(&b.transpose().matmul(&z)?)
    }
}

/// Solves `A X = B` for symmetric positive-definite `A`.
pub fn spd_solve<T: Scalar>(a: &SpdMatrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.solve(b)
}

/// Log-determinant of a symmetric positive-definite matrix.
pub fn log_det_spd<T: Scalar>(a: &SpdMatrix<T>) -> T {
    a.log_det()
}

/// Diagonal matrix stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagMatrix<T> {
    diag: Vec<T>,
}

impl<T: Scalar> DiagMatrix<T> {
    pub fn new(diag: Vec<T>) -> Self {
        Self { diag }
    }

    pub fn identity(n: usize) -> Self {
        Self::filled(n, T::one())
    }

    pub fn filled(n: usize, value: T) -> Self {
        Self {
            diag: vec![value; n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::filled(n, T::zero())
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.diag
    }

    pub fn trace(&self) -> T {
        self.diag.iter().copied().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.diag.iter().all(|&x| x == T::zero())
    }

    pub fn sqrt(&self) -> Self {
        Self::new(self.diag.iter().map(|x| x.sqrt()).collect())
    }

    pub fn add(&self, rhs: &DiagMatrix<T>) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::dims("DiagMatrix::add", self.dim(), rhs.dim()));
        }
        Ok(Self::new(
            self.diag
                .iter()
                .zip(&rhs.diag)
                .map(|(&a, &b)| a + b)
                .collect(),
        ))
    }

    /// Entrywise product of two diagonal matrices.
    pub fn mul(&self, rhs: &DiagMatrix<T>) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::dims("DiagMatrix::mul", self.dim(), rhs.dim()));
        }
        Ok(Self::new(
            self.diag
                .iter()
                .zip(&rhs.diag)
                .map(|(&a, &b)| a * b)
                .collect(),
        ))
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| if i == j { self.diag[i] } else { T::zero() })
    }

    pub fn to_sym(&self) -> SymMatrix<T> {
        SymMatrix(self.to_matrix())
    }

    /// `M · D`: scales column `j` of `m` by `d_j`.
    pub fn right_scale(&self, m: &Matrix<T>) -> Result<Matrix<T>> {
        if m.cols() != self.dim() {
            return Err(Error::dims("right_scale", self.dim(), m.cols()));
        }
        Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
            m[(i, j)] * self.diag[j]
        }))
    }
}

impl<T> Index<usize> for DiagMatrix<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.diag[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    fn random_spd(n: usize, seed: u64) -> SymMatrix<f64> {
        // B Bᵀ + n·I from a tiny LCG keeps this test free of RNG crates
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let b = Matrix::from_fn(n, n, |_, _| next());
        let mut a = b.matmul(&b.transpose()).unwrap();
        for i in 0..n {
            a[(i, i)] += n as f64;
        }
        symmetrize(&a).unwrap()
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let id = SymMatrix::<f64>::identity(3);
        assert_eq!(cholesky_lower(&id, 0.0).unwrap(), Matrix::identity(3));
        let d = DiagMatrix::new(vec![4.0, 9.0]).to_sym();
        assert_eq!(
            cholesky_lower(&d, 0.0).unwrap(),
            DiagMatrix::new(vec![2.0, 3.0]).to_matrix()
        );
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        for seed in 0..20 {
            let a = random_spd(4, seed);
            let l = cholesky_lower(&a, 0.0).unwrap();
            let err = l
                .matmul(&l.transpose())
                .unwrap()
                .max_abs_diff(a.as_matrix())
                .unwrap();
            assert!(err < 1e-10, "seed {seed}: {err}");
            for i in 0..4 {
                for j in (i + 1)..4 {
                    assert_eq!(l[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = symmetrize(&m(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        match cholesky_lower(&a, 0.0) {
            Err(Error::NotPositiveDefinite { index: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let z = SymMatrix::<f64>::zeros(2);
        assert!(cholesky_lower(&z, 0.0).is_err());
        assert!(cholesky_lower(&z, 1e-12).is_ok());
    }

    #[test]
    fn ridge_must_be_non_negative() {
        assert!(SpdMatrix::with_ridge(SymMatrix::<f64>::identity(2), -1.0).is_err());
    }

    #[test]
    fn solve_examples() {
        let id = SpdMatrix::<f64>::identity(2);
        let b = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(spd_solve(&id, &b).unwrap(), b);
        let d = SpdMatrix::from_diag(&DiagMatrix::new(vec![2.0, 4.0])).unwrap();
        let x = spd_solve(&d, &m(&[&[1.0], &[1.0]])).unwrap();
        assert!(x.max_abs_diff(&m(&[&[0.5], &[0.25]])).unwrap() < 1e-15);
    }

    #[test]
    fn solve_residual_is_small() {
        let a = SpdMatrix::new(random_spd(5, 7)).unwrap();
        let b = Matrix::from_fn(5, 3, |i, j| (i as f64 - 2.0) * 0.3 + j as f64);
        let x = spd_solve(&a, &b).unwrap();
        let r = a.as_matrix().matmul(&x).unwrap().max_abs_diff(&b).unwrap();
        assert!(r < 1e-9);
        let inv = spd_solve(&a, a.as_matrix()).unwrap();
        assert!(inv.max_abs_diff(&Matrix::identity(5)).unwrap() < 1e-9);
    }

    #[test]
    fn solve_rejects_wrong_rows() {
        let id = SpdMatrix::<f64>::identity(2);
        assert!(matches!(
            spd_solve(&id, &Matrix::zeros(3, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn det3(a: &Matrix<f64>) -> f64 {
        a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
            - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
            + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det_spd(&SpdMatrix::<f64>::identity(5)), 0.0);
        let d = SpdMatrix::from_diag(&DiagMatrix::new(vec![2.0, 3.0])).unwrap();
        assert!((log_det_spd(&d) - 6f64.ln()).abs() < 1e-12);
        for seed in 0..10 {
            let a = random_spd(3, seed);
            let expected = det3(a.as_matrix()).ln();
            let got = log_det_spd(&SpdMatrix::new(a).unwrap());
            assert!((got - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetrize_examples() {
        let a = m(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert_eq!(
            symmetrize(&a).unwrap().as_matrix(),
            &m(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
        let s = random_spd(3, 1);
        assert_eq!(symmetrize(s.as_matrix()).unwrap(), s);
        let skew = m(&[&[0.0, 1.5, -2.0], &[-1.5, 0.0, 0.25], &[2.0, -0.25, 0.0]]);
        let shifted = s.as_matrix().add(&skew).unwrap();
        assert!(
            symmetrize(&shifted)
                .unwrap()
                .as_matrix()
                .max_abs_diff(s.as_matrix())
                .unwrap()
                < 1e-15
        );
        assert!(symmetrize(&Matrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn sym_new_requires_exact_symmetry() {
        assert!(SymMatrix::new(m(&[&[1.0, 0.5], &[0.5000001, 1.0]])).is_err());
        assert!(SymMatrix::new(m(&[&[1.0, 0.5], &[0.5, 1.0]])).is_ok());
    }

    #[test]
    fn works_in_single_precision() {
        let a =
            symmetrize(&Matrix::<f32>::from_f64_rows(&[[4.0, 1.0], [1.0, 3.0]]).unwrap()).unwrap();
        let spd = SpdMatrix::new(a).unwrap();
        assert!((spd.log_det() - 11f32.ln()).abs() < 1e-5);
    }
}
