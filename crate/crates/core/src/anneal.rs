//! Single-spin-flip simulated annealing for [`QuboProblem`]s.

use alloc::vec::Vec;
use core::time::Duration;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::codec::SpinVector;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qubo::QuboProblem;
use crate::rng::{derive_seed, rng_from_seed};
use crate::timer::Stopwatch;

/// Number of random flips probed by [`AnnealSchedule::auto`].
pub const PROBE_FLIPS: usize = 100;

/// Final temperature as a fraction of the starting one for [`AnnealSchedule::auto`].
pub const AUTO_END_RATIO: f64 = 1e-3;

/// Spin assignment with its local fields `W q` and energy, updated incrementally.
#[derive(Debug, Clone)]
pub struct SpinState<'a> {
    w: &'a Matrix,
    q: Vec<u8>,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> SpinState<'a> {
    pub fn new(problem: &'a QuboProblem, q: Vec<u8>) -> Result<Self> {
        Error::check_len("spin vector", problem.dim(), q.len())?;
        let w = problem.matrix();
        let mut state = SpinState {
            w,
            q,
            field: Vec::new(),
            energy: 0.0,
        };
        state.resync(problem.offset());
        Ok(state)
    }

    /// Recomputes fields and energy from scratch.
    pub fn resync(&mut self, offset: f64) {
        let d = self.q.len();
        self.field = (0..d)
            .map(|a| {
                let row = self.w.row(a);
                (0..d).filter(|&b| self.q[b] != 0).map(|b| row[b]).sum()
            })
            .collect();
        self.energy = offset
            + (0..d)
                .filter(|&a| self.q[a] != 0)
                .map(|a| self.field[a])
                .sum::<f64>();
    }

    /// Energy change from flipping spin `a`.
    #[inline]
    pub fn delta(&self, a: usize) -> f64 {
        let waa = self.w[(a, a)];
        let sign = if self.q[a] == 0 { 1.0 } else { -1.0 };
        sign * (2.0 * self.field[a] - 2.0 * waa * f64::from(self.q[a]) + waa)
    }

    #[inline]
    pub fn flip(&mut self, a: usize) {
        let d = self.delta(a);
        let sign = if self.q[a] == 0 { 1.0 } else { -1.0 };
        self.q[a] ^= 1;
        for (f, w) in self.field.iter_mut().zip(self.w.row(a)) {
            *f += sign * w;
        }
        self.energy += d;
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn spins(&self) -> &[u8] {
        &self.q
    }

    pub fn into_spins(self) -> Vec<u8> {
        self.q
    }
}

/// Geometric temperature schedule with independent restarts.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnealSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !(self.t_start > self.t_end) || !self.t_start.is_finite() {
            return Err(Error::invalid(alloc::format!(
                "need t_start > t_end > 0, got t_start={}, t_end={}",
                self.t_start,
                self.t_end
            )));
        }
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(Error::invalid("sweeps and restarts must be at least 1"));
        }
        Ok(())
    }

    /// Starting temperature is the largest `|ΔE|` seen over [`PROBE_FLIPS`] random flips
    /// from a random state; the final one is [`AUTO_END_RATIO`] of that.
    pub fn auto(problem: &QuboProblem, sweeps: usize, restarts: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(derive_seed(&[seed, 0x70_726f_6265]));
        let d = problem.dim();
        let mut scale: f64 = 0.0;
        if d > 0 {
            let q: Vec<u8> = (0..d).map(|_| rng.random_range(0..2u8)).collect();
            let mut state = SpinState::new(problem, q).expect("length matches");
            for _ in 0..PROBE_FLIPS {
                let a = rng.random_range(0..d);
                scale = scale.max(state.delta(a).abs());
                state.flip(a);
            }
        }
        if !(scale > 0.0) || !scale.is_finite() {
            scale = 1.0;
        }
        AnnealSchedule {
            t_start: scale,
            t_end: scale * AUTO_END_RATIO,
            sweeps,
            restarts,
            seed,
        }
    }

    /// Temperature used for sweep `k` of `sweeps`.
    pub fn temperature(&self, k: usize) -> f64 {
        if self.sweeps <= 1 {
            return self.t_end;
        }
        let frac = k as f64 / (self.sweeps - 1) as f64;
        self.t_start * libm::pow(self.t_end / self.t_start, frac)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveResult {
    pub q_best: SpinVector,
    /// `q_bestᵀ W q_best + h`, evaluated from scratch.
    pub energy: f64,
    /// Decoded signal, ancillas stripped.
    pub x_hat: Vec<f64>,
    pub restarts_run: usize,
    pub best_restart: usize,
    pub wall_time: Duration,
}

/// Metropolis annealing; returns the lowest-energy state seen over all restarts.
///
/// Each restart draws a random initial state and a random sweep order from its own
/// stream (derived from `schedule.seed` and the restart index), then runs `sweeps`
/// passes over all spins at geometrically decreasing temperature.
pub fn solve_sa(problem: &QuboProblem, schedule: &AnnealSchedule) -> Result<SolveResult> {
    schedule.validate()?;
    let clock = Stopwatch::start();
    let d = problem.dim();
    let temps: Vec<f64> = (0..schedule.sweeps)
        .map(|k| schedule.temperature(k))
        .collect();

    let mut best: Option<(f64, Vec<u8>, usize)> = None;
    for restart in 0..schedule.restarts {
        let mut rng = rng_from_seed(derive_seed(&[schedule.seed, restart as u64]));
        let q0: Vec<u8> = (0..d).map(|_| rng.random_range(0..2u8)).collect();
        let mut order: Vec<usize> = (0..d).collect();
        order.shuffle(&mut rng);

        let mut state = SpinState::new(problem, q0)?;
        let mut run_best = state.energy();
        let mut run_best_q = state.spins().to_vec();
        for &t in &temps {
            for &a in &order {
                let delta = state.delta(a);
                if delta <= 0.0 || rng.random::<f64>() < libm::exp(-delta / t) {
                    state.flip(a);
                    if state.energy() < run_best {
                        run_best = state.energy();
                        run_best_q.copy_from_slice(state.spins());
                    }
                }
            }
        }
        let exact = problem.energy(&run_best_q);
        if best.as_ref().is_none_or(|(e, _, _)| exact < *e) {
            best = Some((exact, run_best_q, restart));
        }
    }

    let (energy, q, best_restart) = best.expect("at least one restart");
    Ok(SolveResult {
        x_hat: problem.decode(&q)?,
        q_best: SpinVector::new(q)?,
        energy,
        restarts_run: schedule.restarts,
        best_restart,
        wall_time: clock.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand_distr::StandardNormal;

    fn schedule(seed: u64) -> AnnealSchedule {
        AnnealSchedule {
            t_start: 2.0,
            t_end: 0.01,
            sweeps: 200,
            restarts: 4,
            seed,
        }
    }

    #[test]
    fn identity_prefers_all_zero() {
        let p = QuboProblem::from_matrix(Matrix::identity(8), 0.0).unwrap();
        let r = solve_sa(&p, &schedule(1)).unwrap();
        assert_eq!(r.q_best.as_slice(), &[0; 8]);
        assert_eq!(r.energy, 0.0);
    }

    #[test]
    fn negative_identity_prefers_all_one() {
        let mut w = Matrix::identity(8);
        w.as_mut_slice().iter_mut().for_each(|v| *v = -*v);
        let p = QuboProblem::from_matrix(w, 0.0).unwrap();
        let r = solve_sa(&p, &schedule(2)).unwrap();
        assert_eq!(r.q_best.as_slice(), &[1; 8]);
        assert_eq!(r.energy, -8.0);
        assert_eq!(r.x_hat, vec![1.0; 8]);
    }

    fn random_problem(d: usize, seed: u64) -> QuboProblem {
        let mut rng = rng_from_seed(seed);
        let mut w = Matrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let v: f64 = rng.sample(StandardNormal);
                w[(a, b)] = v;
                w[(b, a)] = v;
            }
        }
        QuboProblem::from_matrix(w, 0.5).unwrap()
    }

    #[test]
    fn incremental_energy_does_not_drift() {
        let p = random_problem(30, 3);
        let mut rng = rng_from_seed(4);
        let mut state = SpinState::new(&p, vec![0; 30]).unwrap();
        for _ in 0..100_000 {
            state.flip(rng.random_range(0..30));
        }
        let fresh = p.energy(state.spins());
        assert!(
            (state.energy() - fresh).abs() < 1e-7,
            "{} vs {fresh}",
            state.energy()
        );
    }

    #[test]
    fn delta_matches_recomputation() {
        let p = random_problem(10, 5);
        let q = vec![1, 0, 1, 1, 0, 0, 1, 0, 1, 0];
        let state = SpinState::new(&p, q.clone()).unwrap();
        for a in 0..10 {
            let mut q2 = q.clone();
            q2[a] ^= 1;
            assert!((state.delta(a) - (p.energy(&q2) - p.energy(&q))).abs() < 1e-12);
        }
    }

    #[test]
    fn reported_energy_is_reproducible() {
        let p = random_problem(14, 6);
        let r = solve_sa(&p, &schedule(7)).unwrap();
        assert!((p.energy(&r.q_best) - r.energy).abs() <= 1e-9);
        assert!(r.best_restart < r.restarts_run);
    }

    #[test]
    fn deterministic_given_seed() {
        let p = random_problem(12, 8);
        let a = solve_sa(&p, &schedule(9)).unwrap();
        let b = solve_sa(&p, &schedule(9)).unwrap();
        assert_eq!(a.q_best, b.q_best);
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.best_restart, b.best_restart);
    }

    #[test]
    fn schedule_validation() {
        let mut s = schedule(0);
        s.t_end = s.t_start;
        assert!(s.validate().is_err());
        let mut s = schedule(0);
        s.sweeps = 0;
        assert!(s.validate().is_err());
        let mut s = schedule(0);
        s.restarts = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn auto_schedule_is_positive_and_ordered() {
        let p = random_problem(10, 11);
        let s = AnnealSchedule::auto(&p, 100, 2, 3);
        assert!(s.t_start > 0.0 && (s.t_end - s.t_start * AUTO_END_RATIO).abs() < 1e-15);
        assert!(s.validate().is_ok());
        // all-zero matrix falls back to unit scale
        let z = QuboProblem::from_matrix(Matrix::zeros(3, 3), 0.0).unwrap();
        assert_eq!(AnnealSchedule::auto(&z, 10, 1, 0).t_start, 1.0);
    }

    #[test]
    fn temperatures_are_geometric() {
        let s = AnnealSchedule {
            t_start: 8.0,
            t_end: 0.5,
            sweeps: 5,
            restarts: 1,
            seed: 0,
        };
        let t: Vec<f64> = (0..5).map(|k| s.temperature(k)).collect();
        assert!((t[0] - 8.0).abs() < 1e-12 && (t[4] - 0.5).abs() < 1e-12);
        assert!((t[2] - 2.0).abs() < 1e-12);
    }
}
