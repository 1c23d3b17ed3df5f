//! Classical sparse approximation: orthogonal matching pursuit and ISTA for the lasso.
//!
//! The lasso objective here is `||A x − b||² + λ ||x||_1`, without the customary ½ on
//! the quadratic term, so that `λ` is on the same footing as the squared error used by
//! the QUBO formulation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, max_eigenvalue_gram, residual_sq, Matrix};

/// Power-iteration steps used to estimate the Lipschitz constant.
pub const POWER_ITERATIONS: usize = 100;

/// `k`-sparse estimate by orthogonal matching pursuit.
pub fn omp(a: &Matrix, b: &[f64], k: usize) -> Result<Vec<f64>> {
    omp_with_trace(a, b, k).map(|(x, _)| x)
}

/// OMP estimate plus the squared residual after each of the `k` iterations.
///
/// Each iteration adds the unused column with the largest `|a_jᵀ r|` (ties go to the
/// smaller index), refits least squares on the support and recomputes the residual.
pub fn omp_with_trace(a: &Matrix, b: &[f64], k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    Error::check_len("measurement vector", a.rows(), b.len())?;
    let limit = a.rows().min(a.cols());
    if k == 0 || k > limit {
        return Err(Error::invalid(format!(
            "OMP needs 1 <= k <= {limit}, got {k}"
        )));
    }
    let n = a.cols();
    let mut used = vec![false; n];
    let mut support = Vec::with_capacity(k);
    let mut residual = b.to_vec();
    let mut coef = Vec::new();
    let mut trace = Vec::with_capacity(k);

    for _ in 0..k {
        let corr = a.tr_mul_vec(&residual);
        let mut pick = None;
        let mut best = -1.0;
        for (j, c) in corr.iter().enumerate() {
            if !used[j] && c.abs() > best {
                best = c.abs();
                pick = Some(j);
            }
        }
        let j = pick.expect("k <= N leaves an unused column");
        used[j] = true;
        support.push(j);

        let a_s = a.select_columns(&support);
        coef = least_squares(&a_s, b)?;
        let fit = a_s.mul_vec(&coef);
        for ((r, bi), fi) in residual.iter_mut().zip(b).zip(&fit) {
            *r = bi - fi;
        }
        trace.push(residual.iter().map(|r| r * r).sum());
    }

    let mut x = vec![0.0; n];
    for (&j, &c) in support.iter().zip(&coef) {
        x[j] = c;
    }
    Ok((x, trace))
}

#[inline]
fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

pub fn lasso_objective(a: &Matrix, b: &[f64], x: &[f64], lambda_l1: f64) -> f64 {
    residual_sq(a, x, b) + lambda_l1 * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Lasso estimate by iterative soft thresholding, starting from zero.
///
/// Step `1/L` with `L` the largest eigenvalue of `AᵀA` (power iteration), threshold
/// `λ / (2L)`. Stops once an iterate moves less than `tol` in every coordinate, or after
/// `max_iters` iterations.
pub fn lasso_ista(
    a: &Matrix,
    b: &[f64],
    lambda_l1: f64,
    max_iters: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    lasso_ista_inner(a, b, lambda_l1, max_iters, tol, false).map(|(x, _)| x)
}

/// Like [`lasso_ista`], also returning the objective at every iterate (index 0 is the
/// starting point).
pub fn lasso_ista_with_history(
    a: &Matrix,
    b: &[f64],
    lambda_l1: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    lasso_ista_inner(a, b, lambda_l1, max_iters, tol, true)
}

fn lasso_ista_inner(
    a: &Matrix,
    b: &[f64],
    lambda_l1: f64,
    max_iters: usize,
    tol: f64,
    record: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Error::check_len("measurement vector", a.rows(), b.len())?;
    if !(lambda_l1 > 0.0) || !lambda_l1.is_finite() {
        return Err(Error::invalid(format!(
            "lasso penalty must be positive, got {lambda_l1}"
        )));
    }
    let n = a.cols();
    let mut x = vec![0.0; n];
    let mut history = Vec::new();
    if record {
        history.push(lasso_objective(a, b, &x, lambda_l1));
    }
    let lipschitz = max_eigenvalue_gram(a, POWER_ITERATIONS);
    if !(lipschitz > 0.0) {
        return Ok((x, history));
    }
    let step = 1.0 / lipschitz;
    let threshold = lambda_l1 / (2.0 * lipschitz);

    let mut residual: Vec<f64> = b.iter().map(|v| -v).collect();
    for _ in 0..max_iters {
        let grad = a.tr_mul_vec(&residual);
        let mut change: f64 = 0.0;
        for (xi, g) in x.iter_mut().zip(&grad) {
            let next = soft_threshold(*xi - step * g, threshold);
            change = change.max((next - *xi).abs());
            *xi = next;
        }
        residual = a.mul_vec(&x);
        for (r, bi) in residual.iter_mut().zip(b) {
            *r -= bi;
        }
        if record {
            history.push(
                residual.iter().map(|r| r * r).sum::<f64>()
                    + lambda_l1 * x.iter().map(|v| v.abs()).sum::<f64>(),
            );
        }
        if change < tol {
            break;
        }
    }
    Ok((x, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_low_coherence_matrix, synthesize_measurements};
    use crate::linalg::norm2;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn omp_single_column() {
        let a = generate_low_coherence_matrix(6, 10, 0.02, 200, 1).unwrap();
        let b = a.column(4);
        let x = omp(&a, &b, 1).unwrap();
        for (j, v) in x.iter().enumerate() {
            let e = if j == 4 { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn omp_orthonormal_exact() {
        let a = Matrix::identity(6);
        let x0 = [0.0, 2.0, 0.0, -1.0, 0.0, 3.0];
        let x = omp(&a, &a.mul_vec(&x0), 3).unwrap();
        for (p, q) in x.iter().zip(&x0) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn omp_residual_non_increasing_and_distinct_columns() {
        let a = generate_low_coherence_matrix(8, 16, 0.02, 2000, 2).unwrap();
        let mut x0 = vec![0.0; 16];
        x0[1] = 1.0;
        x0[7] = 1.0;
        x0[12] = 1.0;
        let b = synthesize_measurements(&a, &x0, 0.1, 3).unwrap();
        let (x, trace) = omp_with_trace(&a, &b, 3).unwrap();
        assert_eq!(trace.len(), 3);
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{trace:?}");
        assert!(trace[0] <= crate::linalg::sq_norm(&b));
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 3);
    }

    #[test]
    fn omp_rejects_bad_k() {
        let a = Matrix::identity(3);
        assert!(omp(&a, &[1.0; 3], 0).is_err());
        assert!(omp(&a, &[1.0; 3], 4).is_err());
    }

    #[test]
    fn lasso_full_shrinkage() {
        let a = generate_low_coherence_matrix(5, 8, 0.02, 100, 4).unwrap();
        let mut rng = rng_from_seed(5);
        let b: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
        let cap = 2.0
            * a.tr_mul_vec(&b)
                .iter()
                .fold(0.0, |m: f64, v| m.max(v.abs()));
        assert_eq!(lasso_ista(&a, &b, cap, 1000, 1e-10).unwrap(), vec![0.0; 8]);
    }

    #[test]
    fn lasso_identity_is_soft_threshold() {
        let a = Matrix::identity(4);
        let b = [3.0, -0.2, -2.0, 0.5];
        let x = lasso_ista(&a, &b, 1.0, 100, 1e-12).unwrap();
        let expected = [2.5, 0.0, -1.5, 0.0];
        for (p, q) in x.iter().zip(&expected) {
            assert!((p - q).abs() < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn lasso_objective_monotone_and_optimal() {
        let a = generate_low_coherence_matrix(10, 20, 0.02, 500, 6).unwrap();
        let mut x0 = vec![0.0; 20];
        x0[3] = 1.0;
        x0[11] = -2.0;
        let b = synthesize_measurements(&a, &x0, 0.05, 7).unwrap();
        let lambda = 0.3;
        let (x, hist) = lasso_ista_with_history(&a, &b, lambda, 20_000, 1e-12).unwrap();
        assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        // subgradient conditions
        let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        let g = a.tr_mul_vec(&r);
        for (xi, gi) in x.iter().zip(&g) {
            if *xi == 0.0 {
                assert!((2.0 * gi).abs() <= lambda + 1e-4);
            } else {
                assert!((2.0 * gi + lambda * xi.signum()).abs() <= 1e-4);
            }
        }
        assert!(norm2(&x) > 0.0);
    }

    #[test]
    fn lasso_rejects_nonpositive_penalty() {
        assert!(lasso_ista(&Matrix::identity(2), &[1.0, 1.0], 0.0, 10, 1e-6).is_err());
    }
}
