//! Small dense semidefinite programming solver.
//!
//! Problems are stated in the standard primal form
//!
//! ```text
//!   maximize   tr(C X)
//!   subject to tr(A_i X) = b_i,   i = 1..m
//!              X ⪰ 0   (block diagonal)
//! ```
//!
//! with the dual
//!
//! ```text
//!   minimize   b·y
//!   subject to Z = Σ_i y_i A_i − C ⪰ 0.
//! ```
//!
//! The solver is an infeasible primal-dual path-following method with
//! Nesterov–Todd scaling and a Mehrotra predictor-corrector step. All linear
//! algebra is dense; the Schur complement is factored by Cholesky. It is
//! meant for programs with a few hundred rows per block at most.

mod block;
mod problem;
mod sdpa;
mod solver;

pub use block::BlockMatrix;
pub use problem::{Entry, SdpProblem, SparseSym};
pub use solver::{solve, SdpOptions, SdpSolution, SdpStatus};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("problem is malformed: {0}")]
    Malformed(String),
    #[error("equality constraints are inconsistent (constraint {index}, residual {residual:e})")]
    InconsistentConstraints { index: usize, residual: f64 },
}
