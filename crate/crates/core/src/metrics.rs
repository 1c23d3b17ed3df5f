//! Error metrics and oracle hyper-parameter selection.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{norm2, sq_norm, Matrix};

/// Magnitude above which a coordinate counts as nonzero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

pub const DEFAULT_GRID_POINTS: usize = 20;

/// Smallest penalty in the default lasso grid.
pub const LASSO_GRID_MIN: f64 = 1e-4;

/// Smallest penalty in the default QUBO grid.
pub const QUBO_GRID_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    /// `||x − x̂||₂ / ||x||₂`
    Reconstruction,
    /// Hamming distance between supports.
    Support,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Reconstruction, Metric::Support];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Reconstruction => "reconstruction",
            Metric::Support => "support",
        }
    }
}

pub fn reconstruction_error(x_true: &[f64], x_hat: &[f64]) -> Result<f64> {
    Error::check_len("estimate", x_true.len(), x_hat.len())?;
    let denom = norm2(x_true);
    if denom == 0.0 {
        return Err(Error::invalid(
            "relative error is undefined for a zero ground truth",
        ));
    }
    let diff: Vec<f64> = x_true.iter().zip(x_hat).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) / denom)
}

/// Indicator of `|x_i| > zero_tol`.
pub fn support(x: &[f64], zero_tol: f64) -> Vec<u8> {
    x.iter().map(|v| u8::from(v.abs() > zero_tol)).collect()
}

pub fn support_error(x_true: &[f64], x_hat: &[f64], zero_tol: f64) -> Result<usize> {
    Error::check_len("estimate", x_true.len(), x_hat.len())?;
    Ok(support(x_true, zero_tol)
        .into_iter()
        .zip(support(x_hat, zero_tol))
        .filter(|(a, b)| a != b)
        .count())
}

pub fn evaluate(metric: Metric, x_true: &[f64], x_hat: &[f64], zero_tol: f64) -> Result<f64> {
    match metric {
        Metric::Reconstruction => reconstruction_error(x_true, x_hat),
        Metric::Support => support_error(x_true, x_hat, zero_tol).map(|e| e as f64),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tuned {
    pub param: f64,
    pub estimate: Vec<f64>,
    pub error: f64,
    /// Grid points where the method failed, with the reason.
    pub failures: Vec<(f64, Error)>,
}

/// Runs `method` at every grid value and keeps the one with the smallest `metric`
/// against `x_true`; equal errors go to the smaller parameter.
pub fn oracle_tune<F>(
    method: F,
    grid: &[f64],
    x_true: &[f64],
    metric: Metric,
    zero_tol: f64,
) -> Result<Tuned>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let scan = scan_grid(method, grid)?;
    select(&scan, x_true, metric, zero_tol)
}

/// Tunes for every [`Metric`] from a single pass over the grid, in [`Metric::ALL`]
/// order.
pub fn oracle_tune_all<F>(
    method: F,
    grid: &[f64],
    x_true: &[f64],
    zero_tol: f64,
) -> Result<[Tuned; 2]>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let scan = scan_grid(method, grid)?;
    Ok([
        select(&scan, x_true, Metric::Reconstruction, zero_tol)?,
        select(&scan, x_true, Metric::Support, zero_tol)?,
    ])
}

type Scan = Vec<(f64, Result<Vec<f64>>)>;

fn scan_grid<F>(mut method: F, grid: &[f64]) -> Result<Scan>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    if grid.is_empty() {
        return Err(Error::invalid("tuning grid is empty"));
    }
    Ok(grid.iter().map(|&p| (p, method(p))).collect())
}

fn select(scan: &Scan, x_true: &[f64], metric: Metric, zero_tol: f64) -> Result<Tuned> {
    let mut failures = Vec::new();
    let mut best: Option<(f64, f64, &Vec<f64>)> = None;
    for (param, outcome) in scan {
        let scored = outcome
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|x| evaluate(metric, x_true, x, zero_tol).map(|e| (e, x)));
        match scored {
            Ok((err, x)) => {
                let better = match best {
                    None => true,
                    Some((be, bp, _)) => err < be || (err == be && *param < bp),
                };
                if better {
                    best = Some((err, *param, x));
                }
            }
            Err(e) => failures.push((*param, e)),
        }
    }
    match best {
        Some((error, param, x)) => Ok(Tuned {
            param,
            estimate: x.clone(),
            error,
            failures,
        }),
        None => Err(Error::AllGridPointsFailed {
            failures: failures.len(),
        }),
    }
}

/// `points` values spaced evenly in log scale from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (libm::log(lo), libm::log(hi));
            (0..points)
                .map(|i| libm::exp(a + (b - a) * i as f64 / (points - 1) as f64))
                .collect()
        }
    }
}

/// Lasso penalties from [`LASSO_GRID_MIN`] to `2 ||Aᵀb||_∞`, where everything is shrunk
/// to zero.
pub fn lasso_grid(a: &Matrix, b: &[f64], points: usize) -> Vec<f64> {
    let top = 2.0 * a.tr_mul_vec(b).iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    log_grid(LASSO_GRID_MIN, top.max(LASSO_GRID_MIN * 10.0), points)
}

/// QUBO penalties from [`QUBO_GRID_MIN`] to `||b||²`; any larger penalty makes the zero
/// vector optimal.
pub fn qubo_lambda_grid(b: &[f64], points: usize) -> Vec<f64> {
    log_grid(QUBO_GRID_MIN, sq_norm(b).max(QUBO_GRID_MIN * 10.0), points)
}

/// Cardinalities `1..=k_max`.
pub fn cardinality_grid(k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| k as f64).collect()
}
