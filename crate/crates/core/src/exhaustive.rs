//! Exhaustive solvers: QUBO enumeration and best-subset least squares.

use alloc::vec;
use alloc::vec::Vec;

use crate::anneal::{SolveResult, SpinState};
use crate::codec::SpinVector;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, residual_sq, sq_norm, Matrix};
use crate::qubo::QuboProblem;
use crate::timer::Stopwatch;

/// Default spin-count limit for [`solve_exhaustive_qubo`].
pub const MAX_EXHAUSTIVE_SPINS: usize = 26;

/// Default limit on the number of supports [`solve_exhaustive_sparse`] will visit.
pub const MAX_SUPPORTS: u128 = 10_000_000;

const RESYNC_EVERY: u64 = 1 << 16;

/// Global minimum of `qᵀ W q + h` over all `2^D` spin vectors, `D ≤ 26`.
///
/// Ties (within `1e-9 (1 + |E|)`) resolve to the lexicographically smallest vector.
pub fn solve_exhaustive_qubo(problem: &QuboProblem) -> Result<SolveResult> {
    solve_exhaustive_qubo_with_limit(problem, MAX_EXHAUSTIVE_SPINS)
}

pub fn solve_exhaustive_qubo_with_limit(
    problem: &QuboProblem,
    max_spins: usize,
) -> Result<SolveResult> {
    let d = problem.dim();
    if d > max_spins || d >= 64 {
        return Err(Error::TooLarge {
            what: "exhaustive QUBO enumeration",
            required: 1u128 << d.min(127),
            limit: 1u128 << max_spins.min(127),
        });
    }
    let clock = Stopwatch::start();
    let lex_key = |mask: u64| {
        if d == 0 {
            0
        } else {
            mask.reverse_bits() >> (64 - d)
        }
    };

    // Gray-code walk: step t flips the lowest set bit of t.
    let mut state = SpinState::new(problem, vec![0; d])?;
    let mut mask = 0u64;
    let mut best_energy = state.energy();
    let mut best_mask = 0u64;
    for step in 1..(1u64 << d) {
        let a = step.trailing_zeros() as usize;
        state.flip(a);
        mask ^= 1 << a;
        if step % RESYNC_EVERY == 0 {
            state.resync(problem.offset());
        }
        let e = state.energy();
        let tol = 1e-9 * (1.0 + best_energy.abs());
        if e < best_energy - tol || (e <= best_energy + tol && lex_key(mask) < lex_key(best_mask)) {
            best_energy = e.min(best_energy);
            best_mask = mask;
        }
    }

    let q: Vec<u8> = (0..d).map(|a| ((best_mask >> a) & 1) as u8).collect();
    Ok(SolveResult {
        energy: problem.energy(&q),
        x_hat: problem.decode(&q)?,
        q_best: SpinVector::new(q)?,
        restarts_run: 1,
        best_restart: 0,
        wall_time: clock.elapsed(),
    })
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Best `k`-term least-squares fit, by trying every support of size `k`.
///
/// Starts from `x = 0` with error `||b||²`, refits least squares on each of the `C(N, k)`
/// supports (visited in lexicographic order) and keeps the first one whose squared
/// residual is strictly smaller than the best so far.
pub fn solve_exhaustive_sparse(a: &Matrix, b: &[f64], k: usize) -> Result<Vec<f64>> {
    solve_exhaustive_sparse_with_limit(a, b, k, MAX_SUPPORTS)
}

pub fn solve_exhaustive_sparse_with_limit(
    a: &Matrix,
    b: &[f64],
    k: usize,
    max_supports: u128,
) -> Result<Vec<f64>> {
    Error::check_len("measurement vector", a.rows(), b.len())?;
    let n = a.cols();
    if k > n {
        return Err(Error::invalid(alloc::format!(
            "cardinality k={k} exceeds N={n}"
        )));
    }
    let count = binomial(n, k);
    if count > max_supports {
        return Err(Error::TooLarge {
            what: "exhaustive support search",
            required: count,
            limit: max_supports,
        });
    }

    let mut x_hat = vec![0.0; n];
    let mut best = sq_norm(b);
    if k == 0 {
        return Ok(x_hat);
    }
    let mut support: Vec<usize> = (0..k).collect();
    loop {
        let a_s = a.select_columns(&support);
        let z = least_squares(&a_s, b)?;
        let r = residual_sq(&a_s, &z, b);
        if r < best {
            best = r;
            x_hat.iter_mut().for_each(|v| *v = 0.0);
            for (&i, &zi) in support.iter().zip(&z) {
                x_hat[i] = zi;
            }
        }
        if !next_combination(&mut support, n) {
            break;
        }
    }
    Ok(x_hat)
}

/// Advances a sorted `k`-subset of `0..n` to its lexicographic successor.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
