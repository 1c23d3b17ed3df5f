//! Experiment harness for `sparse-qubo`: sweep configuration, the per-cell experiment
//! runner, aggregation, and the CSV / JSON / SVG file formats.

pub mod aggregate;
pub mod config;
mod error;
pub mod experiment;
pub mod formats;
pub mod output;
pub mod presets;
pub mod svg;

pub use aggregate::{aggregate, AggregateRow};
pub use config::{ExperimentGrid, Method, Overrides, SweepAxis};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, CellFailure, ExperimentOutcome, ResultRow, Timing};
pub use output::emit_outputs;

/// Environment variable holding the number of worker threads for `run`.
pub const WORKERS_ENV: &str = "SPARSE_QUBO_WORKERS";
