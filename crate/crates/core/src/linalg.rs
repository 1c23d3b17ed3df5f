//! Dense row-major matrices and the handful of kernels the solvers need.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Condition estimate above which least squares switches to the minimum-norm solution.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Error::check_len("matrix data", rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            Error::check_len("matrix row", cols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Columns `idx` of `self`, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    /// `self * x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ * y`
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), &mut out);
            }
        }
        out
    }

    /// `self * other`
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), dst);
                }
            }
        }
        out
    }

    /// `selfᵀ * self`, exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for m in 0..self.rows {
            let r = self.row(m);
            for i in 0..n {
                let ri = r[i];
                if ri == 0.0 {
                    continue;
                }
                let gi = &mut g.data[i * n..(i + 1) * n];
                for j in i..n {
                    gi[j] += ri * r[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sq.iter_mut().zip(self.row(i)) {
                *s += v * v;
            }
        }
        sq.into_iter().map(libm::sqrt).collect()
    }

    /// Frobenius norm of `selfᵀ self − I`.
    pub fn gram_identity_deviation(&self) -> f64 {
        let g = self.gram();
        let mut s = 0.0;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let d = g[(i, j)] - if i == j { 1.0 } else { 0.0 };
                s += d * d;
            }
        }
        libm::sqrt(s)
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn sq_norm(a: &[f64]) -> f64 {
    dot(a, a)
}

/// `||a x - b||²`
pub fn residual_sq(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax - bi) * (ax - bi))
        .sum()
}

/// Minimizer of `||a z − b||²`.
///
/// Householder QR when `a` has full column rank with condition estimate at most
/// [`SINGULAR_CONDITION`]; otherwise the minimum-norm solution from a one-sided Jacobi SVD,
/// discarding singular values below `σ_max / SINGULAR_CONDITION`.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Error::check_len("least-squares right-hand side", a.rows(), b.len())?;
    if a.cols() == 0 {
        return Ok(Vec::new());
    }
    if a.cols() <= a.rows() {
        if let Some(z) = qr_solve(a, b) {
            return Ok(z);
        }
    }
    Ok(min_norm_solve(a, b))
}

/// Returns `None` when the triangular factor is too ill-conditioned.
fn qr_solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.cols();
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; n];

    for k in 0..n {
        let norm = libm::sqrt(cols[k][k..].iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return None;
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm_sq > 0.0 {
            for col in cols.iter_mut().skip(k + 1) {
                let s = 2.0 * dot(&v, &col[k..]) / vnorm_sq;
                axpy(-s, &v, &mut col[k..]);
            }
            let s = 2.0 * dot(&v, &rhs[k..]) / vnorm_sq;
            axpy(-s, &v, &mut rhs[k..]);
        }
        cols[k][k] = alpha;
    }

    let dmax = diag.iter().fold(0.0, |acc: f64, d| acc.max(d.abs()));
    let dmin = diag
        .iter()
        .fold(f64::INFINITY, |acc: f64, d| acc.min(d.abs()));
    if !(dmin > 0.0) || dmax / dmin > SINGULAR_CONDITION {
        return None;
    }

    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for (j, zj) in z.iter().enumerate().skip(i + 1) {
            s -= cols[j][i] * zj;
        }
        z[i] = s / diag[i];
    }
    Some(z)
}

/// One-sided Jacobi (Hestenes) SVD of `a`, returning the pseudo-inverse solution.
fn min_norm_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = a.cols();
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    // columns this small are numerically zero; rotating them never converges
    let negligible = 1e-30 * u.iter().map(|c| dot(c, c)).sum::<f64>();

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if alpha <= negligible
                    || beta <= negligible
                    || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta)
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = u.iter().map(|c| norm2(c)).collect();
    let smax = sigma.iter().fold(0.0, |m: f64, s| m.max(*s));
    let cutoff = smax / SINGULAR_CONDITION;
    let mut z = vec![0.0; n];
    for j in 0..n {
        if sigma[j] > cutoff && sigma[j] > 0.0 {
            let coef = dot(&u[j], b) / (sigma[j] * sigma[j]);
            axpy(coef, &v[j], &mut z);
        }
    }
    z
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Largest eigenvalue of `aᵀa` by power iteration from a fixed start vector.
pub fn max_eigenvalue_gram(a: &Matrix, iterations: usize) -> f64 {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.01 * libm::sqrt(i as f64 + 1.0))
        .collect();
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let nx = norm2(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let y = a.tr_mul_vec(&a.mul_vec(&x));
        estimate = dot(&x, &y);
        x = y;
    }
    estimate
}
