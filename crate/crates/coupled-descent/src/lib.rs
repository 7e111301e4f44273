//! Randomized block coordinate descent for composite convex minimization
//! under linear coupling constraints.
//!
//! The library solves
//!
//! ```text
//! min  F(x) = 1/2 x' Z'Z x + q' x + h(x)    s.t.  a' x = b   (or A x = b)
//! ```
//!
//! with `Z` sparse-by-columns and `h` coordinatewise separable
//! (zero / l1 / box / l1+box). Four algorithms are provided:
//!
//! - **RCD** — at each step pick a random block pair `(i, j)` and minimize
//!   the pairwise quadratic model exactly on the constraint line.
//! - **RCD_N** — the (m+1)-block generalization for `m` coupling rows.
//! - **CGD** — Gauss-Southwell coordinate gradient descent: a projected
//!   full-gradient direction is decomposed into elementary pairs and the
//!   best pair is solved exactly.
//! - **GM** — the full composite gradient (proximal) step.
//!
//! Each iteration's small subproblem is solved exactly by closed-form
//! piecewise-quadratic minimization or a continuous quadratic knapsack
//! (`subsolvers`). Problem builders for SVM duals, Chebyshev centers and
//! l1-regularized random instances live in `apps`; the reproducible
//! benchmark harness (trace CSVs, multi-seed aggregation, rate fitting)
//! lives in `experiment`.
//!
//! Start with the runnable examples, e.g.
//! `cargo run --release --example chebyshev_center`.

pub mod apps;
pub mod error;
pub mod experiment;
pub mod problem;
pub mod rng;
pub mod solvers;
pub mod sparse;
pub mod subsolvers;

pub use error::{Error, Result};
pub use problem::{
    alpha_dual_norm, alpha_norm, eval_objective, BlockDirection, BlockPartition,
    CompositeProblem, Coupling, DenseMatrix, SeparableTerm, SolverState, StructuredSmooth,
    TermKind,
};
pub use solvers::{
    cgd_solve, gm_solve, rcd_n_solve, rcd_solve, Algorithm, ConvergenceTrace, SolveOutcome,
    SolverConfig, StopReason, StopRule, TraceRow,
};
