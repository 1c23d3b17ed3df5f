//! Synthetic sparse-coding instances: low-coherence sensing matrices, sparse ground
//! truth drawn from a fixed-point format, and noisy measurements `b = A x + v`.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::codec::FixedPointFormat;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{derive_seed, rng_from_seed, SeededRng};

/// Columns of a [`SensingMatrix`] have unit L2 norm within this tolerance.
pub const NORM_TOL: f64 = 1e-12;

pub const DEFAULT_STEP: f64 = 0.02;
pub const DEFAULT_ITERATIONS: usize = 2000;

/// An `M x N` matrix with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SensingMatrix(Matrix);

impl SensingMatrix {
    /// Validates that every column already has unit norm.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() == 0 || m.cols() == 0 {
            return Err(Error::invalid("sensing matrix must be at least 1x1"));
        }
        for (j, norm) in m.column_norms().into_iter().enumerate() {
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::invalid(format!(
                    "column {j} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(SensingMatrix(m))
    }

    /// Rescales every column to unit norm. A zero column is an error.
    pub fn normalize(mut m: Matrix) -> Result<Self> {
        if m.rows() == 0 || m.cols() == 0 {
            return Err(Error::invalid("sensing matrix must be at least 1x1"));
        }
        if let Some(j) = normalize_columns(&mut m) {
            return Err(Error::invalid(format!(
                "column {j} is zero and cannot be normalized"
            )));
        }
        Ok(SensingMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }
}

impl core::ops::Deref for SensingMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Normalizes columns in place; returns the first zero column, if any (left untouched).
fn normalize_columns(m: &mut Matrix) -> Option<usize> {
    let norms = m.column_norms();
    let zero = norms.iter().position(|&n| n == 0.0);
    let inv: Vec<f64> = norms
        .iter()
        .map(|&n| if n == 0.0 { 1.0 } else { 1.0 / n })
        .collect();
    for i in 0..m.rows() {
        for (v, s) in m.row_mut(i).iter_mut().zip(&inv) {
            *v *= s;
        }
    }
    zero
}

/// Normalize, re-drawing any zero column from a standard normal until none remain.
fn normalize_or_redraw(m: &mut Matrix, rng: &mut SeededRng) {
    while let Some(j) = normalize_columns(m) {
        for i in 0..m.rows() {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
}

/// `max_{i≠j} |a_iᵀ a_j|` over the columns of `a`.
pub fn mutual_coherence(a: &Matrix) -> Result<f64> {
    if a.cols() < 2 {
        return Err(Error::invalid(
            "mutual coherence needs at least two columns",
        ));
    }
    let g = a.gram();
    let mut mu: f64 = 0.0;
    for i in 0..g.rows() {
        for j in i + 1..g.cols() {
            mu = mu.max(g[(i, j)].abs());
        }
    }
    Ok(mu)
}

/// `√((N − M) / (M (N − 1)))`, the smallest coherence any `M x N` unit-norm frame can
/// have (zero when `M ≥ N`).
pub fn welch_bound(m: usize, n: usize) -> f64 {
    if m >= n || n < 2 {
        return 0.0;
    }
    libm::sqrt((n - m) as f64 / (m as f64 * (n - 1) as f64))
}

/// Gradient descent on `||AᵀA − I||²_F` with column renormalization after each step.
///
/// Entries start as i.i.d. standard normals (seeded), columns are normalized, then each
/// of the `iterations` steps applies `A ← A − step · 4 A (AᵀA − I)` and renormalizes.
pub fn generate_low_coherence_matrix(
    rows: usize,
    cols: usize,
    step: f64,
    iterations: usize,
    seed: u64,
) -> Result<SensingMatrix> {
    if rows == 0 || cols < 2 {
        return Err(Error::invalid(format!(
            "need M >= 1 and N >= 2, got M={rows}, N={cols}"
        )));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid(format!(
            "step size must be positive, got {step}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut a = Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal));
    normalize_or_redraw(&mut a, &mut rng);

    for _ in 0..iterations {
        let mut g = a.gram();
        for i in 0..cols {
            g[(i, i)] -= 1.0;
        }
        let grad = a.matmul(&g);
        for (v, gv) in a.as_mut_slice().iter_mut().zip(grad.as_slice()) {
            *v -= step * 4.0 * gv;
        }
        normalize_or_redraw(&mut a, &mut rng);
    }
    Ok(SensingMatrix(a))
}

/// A `k`-sparse vector of length `n` whose nonzeros are representable in `format`.
///
/// The support is uniform over `k`-subsets; each nonzero is uniform over the format's
/// nonzero codes for that coordinate.
pub fn sample_sparse_signal(
    n: usize,
    k: usize,
    format: &FixedPointFormat,
    seed: u64,
) -> Result<Vec<f64>> {
    if k > n {
        return Err(Error::invalid(format!(
            "cardinality k={k} exceeds length N={n}"
        )));
    }
    Error::check_len("format", n, format.len())?;
    let mut rng = rng_from_seed(seed);
    let mut support = rand::seq::index::sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    let mut x = alloc::vec![0.0; n];
    for i in support {
        x[i] = format.sample_nonzero(i, &mut rng)?;
    }
    Ok(x)
}

/// `A x + v` with `v ~ N(0, sigma² I)`.
pub fn synthesize_measurements(a: &Matrix, x: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    Error::check_len("signal", a.cols(), x.len())?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!(
            "noise level must be non-negative, got {sigma}"
        )));
    }
    let mut b = a.mul_vec(x);
    if sigma > 0.0 {
        let mut rng = rng_from_seed(seed);
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::invalid(format!("{e}")))?;
        for bi in &mut b {
            *bi += noise.sample(&mut rng);
        }
    }
    Ok(b)
}

/// Everything needed to draw one [`Instance`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceParams {
    pub rows: usize,
    pub cols: usize,
    pub sparsity: usize,
    pub sigma: f64,
    pub step: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Instance {
    pub a: SensingMatrix,
    pub x_true: Vec<f64>,
    pub b: Vec<f64>,
    pub sigma: f64,
    pub seed: u64,
}

impl Instance {
    /// Matrix, signal and noise each get their own stream derived from `seed`.
    pub fn generate(params: &InstanceParams, format: &FixedPointFormat, seed: u64) -> Result<Self> {
        let a = generate_low_coherence_matrix(
            params.rows,
            params.cols,
            params.step,
            params.iterations,
            derive_seed(&[seed, 1]),
        )?;
        let x_true = sample_sparse_signal(
            params.cols,
            params.sparsity,
            format,
            derive_seed(&[seed, 2]),
        )?;
        let b = synthesize_measurements(&a, &x_true, params.sigma, derive_seed(&[seed, 3]))?;
        Ok(Instance {
            a,
            x_true,
            b,
            sigma: params.sigma,
            seed,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.x_true.iter().filter(|v| **v != 0.0).count()
    }
}
