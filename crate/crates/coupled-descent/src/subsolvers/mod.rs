//! Exact solvers for the small optimization subproblems the iterative
//! algorithms are built from: 1-D piecewise-quadratic minimization, the
//! two-block and (m+1)-block directions, continuous quadratic knapsack,
//! simplex projection and conformal realization.
//!
//! All operations here are pure functions of their inputs.

mod conformal;
mod direction;
mod knapsack;
mod pw1d;

pub use conformal::{
    check_decomposition, conformal_realization, ElementaryDecomposition, SparsePiece,
};
pub use direction::{tuple_direction, two_block_direction, TupleOutcome};
pub use knapsack::{
    knapsack_kkt_residual, quadratic_knapsack, quadratic_knapsack_with_multiplier,
    simplex_projection,
};
pub use pw1d::{pw1d_minimize, subgradient_interval, PiecewiseQuadratic1D, Pw1dTerm};

pub(crate) use direction::scalar_pair_core;
pub(crate) use knapsack::solve_coupled_prox;
