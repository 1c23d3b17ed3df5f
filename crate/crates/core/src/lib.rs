//! Sparse coding as quadratic unconstrained binary optimization.
//!
//! The L0-regularized least-squares problem
//! `min_x ||Ax - b||^2 + lambda * ||x||_0` is mapped onto a QUBO over the bits of a
//! fixed-point encoding of `x`. The crate builds the squared-error and cardinality
//! matrices exactly (constant offsets included, so QUBO energy equals the true
//! objective), solves them with simulated annealing or exhaustive enumeration, and
//! provides the classical baselines and error metrics used to benchmark them.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to have solvers
//! record wall-clock time, and `serde` for serializable result types.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod anneal;
pub mod baselines;
pub mod codec;
mod error;
pub mod exhaustive;
pub mod instance;
pub mod linalg;
pub mod metrics;
pub mod qubo;
pub mod rng;
mod timer;

pub use anneal::{solve_sa, AnnealSchedule, SolveResult, SpinState};
pub use baselines::{lasso_ista, omp};
pub use codec::{FixedPointFormat, SpinVector};
pub use error::{Error, Result};
pub use exhaustive::{solve_exhaustive_qubo, solve_exhaustive_sparse};
pub use instance::{Instance, SensingMatrix};
pub use linalg::{least_squares, Matrix};
pub use metrics::{reconstruction_error, support_error, Metric};
pub use qubo::{
    assemble_total, build_base_terms, build_l0_qubo, build_l2_qubo, build_sparse_coding_qubo,
    BaseTerms, QuboProblem,
};
