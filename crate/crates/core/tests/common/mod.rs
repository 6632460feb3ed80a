//! Shared oracles for the integration tests. Nothing here calls into the
//! library's numeric kernels except to build inputs.
#![allow(dead_code)]

use mvdlm::linalg::symmetrize;
use mvdlm::MiwParams;
use mvdlm::{DiagMatrix, Matrix, SpdMatrix, SymMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| normal(rng))
}

/// Random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> Matrix {
    let a = random_matrix(n, n, rng);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut v = a.column(j);
        for q in &cols {
            let dot: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `U diag(eigs) Uᵀ` for a random orthogonal `U`.
pub fn spd_with_eigenvalues(eigs: &[f64], rng: &mut impl Rng) -> SymMatrix {
    let n = eigs.len();
    let u = random_orthogonal(n, rng);
    let d = DiagMatrix::new(eigs.to_vec()).to_matrix();
    symmetrize(&u.matmul(&d).unwrap().matmul(&u.transpose()).unwrap()).unwrap()
}

/// Well-conditioned random SPD matrix with eigenvalues in `[lo, hi]`.
pub fn random_spd(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> SpdMatrix {
    let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    SpdMatrix::new(spd_with_eigenvalues(&eigs, rng)).unwrap()
}

/// Random valid MIW parameters with `n_i ∈ [1, 12)` and `v ∈ [p - 0.3, p + 1)`.
pub fn random_miw(p: usize, rng: &mut impl Rng) -> MiwParams {
    let s = random_spd(p, 0.3, 3.0, rng);
    let n = DiagMatrix::new((0..p).map(|_| rng.random_range(1.0..12.0)).collect());
    let v = p as f64 + rng.random_range(-0.3..1.0);
    MiwParams::new(s, n, v).unwrap()
}

pub fn spd1(x: f64) -> SpdMatrix {
    SpdMatrix::from_matrix(&Matrix::from_rows(&[[x]]).unwrap()).unwrap()
}

pub fn mat1(x: f64) -> Matrix {
    Matrix::from_rows(&[[x]]).unwrap()
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) quadrature

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol * 0.5, depth - 1) + adapt(f, m, b, tol * 0.5, depth - 1)
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 40)
}

/// `∫_0^∞ f` via `x = t / (1 - t)`.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    integrate(
        |t| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let x = t / (1.0 - t);
            let v = f(x) / ((1.0 - t) * (1.0 - t));
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// `∫_{-∞}^{∞} f` via `x = c + t / (1 - t²)`.
pub fn integrate_real_line(f: impl Fn(f64) -> f64, center: f64, tol: f64) -> f64 {
    integrate(
        |t| {
            if t <= -1.0 || t >= 1.0 {
                return 0.0;
            }
            let d = 1.0 - t * t;
            let x = center + t / d;
            let v = f(x) * (1.0 + t * t) / (d * d);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        -1.0,
        1.0,
        tol,
    )
}

// ---------------------------------------------------------------------------
// Dense Gaussian elimination, independent of the Cholesky kernel

/// Returns `(log|det A|, A⁻¹ b)` using partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn lu_logdet_solve(a: &[Vec<f64>], b: &[f64]) -> (f64, Vec<f64>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    let mut logdet = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        x.swap(col, piv);
        let d = m[col][col];
        logdet += d.abs().ln();
        for i in (col + 1)..n {
            let factor = m[i][col] / d;
            for k in col..n {
                m[i][k] -= factor * m[col][k];
            }
            x[i] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    (logdet, x)
}

// ---------------------------------------------------------------------------
// Scalar DLM written out by hand

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarState {
    pub m: f64,
    pub c: f64,
    pub n: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScalarStep {
    pub f: f64,
    pub q: f64,
    pub post: ScalarState,
}

/// One step of the univariate recursions with `u_t ∈ {0, 1}`.
pub fn scalar_dlm_step(
    st: ScalarState,
    y: Option<f64>,
    f_design: f64,
    g: f64,
    v: f64,
    w: Option<f64>,
    delta: Option<f64>,
) -> ScalarStep {
    let a = g * st.m;
    let r = match (w, delta) {
        (Some(w), None) => g * st.c * g + w,
        (None, Some(d)) => g * st.c * g / d,
        _ => panic!("exactly one of w / delta"),
    };
    let f = f_design * a;
    let q = f_design * r * f_design + v;
    let gain = r * f_design / q;
    let post = match y {
        Some(y) => {
            let e = y - f;
            let n = st.n + 1.0;
            ScalarState {
                m: a + gain * e,
                c: r - gain * gain * q,
                n,
                s: (st.n * st.s + e * e / q) / n,
            }
        }
        None => ScalarState {
            m: a,
            c: r,
            n: st.n,
            s: st.s,
        },
    };
    ScalarStep { f, q, post }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
