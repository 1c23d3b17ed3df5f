//! Runs every (sweep value, repetition) cell of an [`ExperimentGrid`].

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sparse_qubo::anneal::{solve_sa, AnnealSchedule};
use sparse_qubo::exhaustive::{binomial, solve_exhaustive_sparse, MAX_SUPPORTS};
use sparse_qubo::instance::Instance;
use sparse_qubo::metrics::{
    cardinality_grid, lasso_grid, oracle_tune_all, qubo_lambda_grid, reconstruction_error,
    support_error, Metric, Tuned,
};
use sparse_qubo::qubo::{assemble_total, build_l0_qubo, build_l2_qubo};
use sparse_qubo::rng::derive_seed;
use sparse_qubo::{lasso_ista, omp, FixedPointFormat};

use crate::config::{CellSettings, ExperimentGrid, Method};
use crate::error::{HarnessError, Result};

/// Stream tags mixed into a cell seed.
const ANNEAL_STREAM: u64 = 0x616e_6e65_616c;

/// One method on one instance, tuned for one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: Method,
    pub tuned_for: Metric,
    pub sweep_value: f64,
    pub repetition: usize,
    pub seed: u64,
    pub tuned_param: f64,
    pub reconstruction_error: f64,
    pub support_error: usize,
    /// Final QUBO energy of the tuned solution (annealer only).
    pub energy: Option<f64>,
}

/// Wall time of one method's full tuning sweep on one instance. Kept apart from
/// [`ResultRow`] so that row output is reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub method: Method,
    pub sweep_value: f64,
    pub repetition: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub sweep_value: f64,
    pub repetition: usize,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub timings: Vec<Timing>,
    pub failures: Vec<CellFailure>,
}

/// Seed for repetition `rep` of sweep value `value`; independent of every other cell.
pub fn cell_seed(base: u64, value: f64, rep: usize) -> u64 {
    derive_seed(&[base, value.to_bits(), rep as u64])
}

/// Runs the grid on the current rayon pool. Output order is fixed (sweep value, then
/// repetition, then method as listed, then metric), so parallelism never changes it.
pub fn run_experiment(grid: &ExperimentGrid) -> Result<ExperimentOutcome> {
    use rayon::prelude::*;

    grid.validate()?;
    let format = grid.format.build(grid.n)?;
    let cells: Vec<(usize, f64, usize)> = grid
        .sweep
        .values
        .iter()
        .enumerate()
        .flat_map(|(vi, &v)| (0..grid.repetitions).map(move |r| (vi, v, r)))
        .collect();

    let results: Vec<ExperimentOutcome> = cells
        .par_iter()
        .map(|&(_, value, rep)| run_cell(grid, &format, value, rep))
        .collect();

    let mut outcome = ExperimentOutcome::default();
    for cell in results {
        outcome.rows.extend(cell.rows);
        outcome.timings.extend(cell.timings);
        outcome.failures.extend(cell.failures);
    }
    Ok(outcome)
}

/// All methods of the grid on one instance.
pub fn run_cell(
    grid: &ExperimentGrid,
    format: &FixedPointFormat,
    value: f64,
    rep: usize,
) -> ExperimentOutcome {
    let seed = cell_seed(grid.seed, value, rep);
    let fail = |method: Option<Method>, message: String| CellFailure {
        sweep_value: value,
        repetition: rep,
        method,
        message,
    };
    let mut out = ExperimentOutcome::default();
    let settings = match grid.cell_settings(value) {
        Ok(s) => s,
        Err(e) => {
            out.failures.push(fail(None, e.to_string()));
            return out;
        }
    };
    let instance = match Instance::generate(&settings.params, format, seed) {
        Ok(i) => i,
        Err(e) => {
            out.failures.push(fail(None, e.to_string()));
            return out;
        }
    };

    for &method in &grid.methods {
        let start = Instant::now();
        match run_method(method, grid, &settings, format, &instance, seed) {
            Ok((tuned, energies)) => {
                out.timings.push(Timing {
                    method,
                    sweep_value: value,
                    repetition: rep,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                });
                for (t, metric) in tuned.iter().zip(Metric::ALL) {
                    let energy = energies
                        .iter()
                        .find(|(p, _)| *p == t.param)
                        .map(|&(_, e)| e);
                    match errors_of(t, &instance, grid.tuning.zero_tol) {
                        Ok((rec, sup)) => out.rows.push(ResultRow {
                            method,
                            tuned_for: metric,
                            sweep_value: value,
                            repetition: rep,
                            seed,
                            tuned_param: t.param,
                            reconstruction_error: rec,
                            support_error: sup,
                            energy,
                        }),
                        Err(e) => out.failures.push(fail(Some(method), e.to_string())),
                    }
                }
            }
            Err(e) => out.failures.push(fail(Some(method), e.to_string())),
        }
    }
    out
}

fn errors_of(tuned: &Tuned, instance: &Instance, zero_tol: f64) -> Result<(f64, usize)> {
    Ok((
        reconstruction_error(&instance.x_true, &tuned.estimate)?,
        support_error(&instance.x_true, &tuned.estimate, zero_tol)?,
    ))
}

type MethodResult = ([Tuned; 2], Vec<(f64, f64)>);

fn run_method(
    method: Method,
    grid: &ExperimentGrid,
    settings: &CellSettings,
    format: &FixedPointFormat,
    instance: &Instance,
    seed: u64,
) -> Result<MethodResult> {
    let a = instance.a.matrix();
    let b = &instance.b;
    let x = &instance.x_true;
    let tuning = &grid.tuning;
    let mut energies = Vec::new();

    let tuned = match method {
        Method::Exhaustive => {
            let k_max = settings.k_max;
            let worst = (1..=k_max).map(|k| binomial(grid.n, k)).max().unwrap_or(0);
            if worst > MAX_SUPPORTS {
                return Err(HarnessError::Config(format!(
                    "exhaustive search with N={} and k up to {k_max} visits {worst} supports (limit {MAX_SUPPORTS})",
                    grid.n
                )));
            }
            oracle_tune_all(
                |k| solve_exhaustive_sparse(a, b, k as usize),
                &cardinality_grid(k_max),
                x,
                tuning.zero_tol,
            )?
        }
        Method::Omp => {
            let k_max = settings.k_max.min(settings.params.rows);
            oracle_tune_all(
                |k| omp(a, b, k as usize),
                &cardinality_grid(k_max),
                x,
                tuning.zero_tol,
            )?
        }
        Method::Lasso => oracle_tune_all(
            |lambda| lasso_ista(a, b, lambda, tuning.lasso_max_iters, tuning.lasso_tol),
            &lasso_grid(a, b, tuning.grid_points),
            x,
            tuning.zero_tol,
        )?,
        Method::QuboSa => {
            let l2 = build_l2_qubo(a, b, format)?;
            let l0 = build_l0_qubo(format)?;
            let sa_seed = derive_seed(&[seed, ANNEAL_STREAM]);
            oracle_tune_all(
                |lambda| {
                    let problem = assemble_total(&l2, &l0, lambda)?;
                    let schedule = AnnealSchedule::auto(
                        &problem,
                        grid.anneal.sweeps,
                        grid.anneal.restarts,
                        sa_seed,
                    );
                    let result = solve_sa(&problem, &schedule)?;
                    energies.push((lambda, result.energy));
                    Ok(result.x_hat)
                },
                &qubo_lambda_grid(b, tuning.grid_points),
                x,
                tuning.zero_tol,
            )?
        }
    };
    Ok((tuned, energies))
}
