//! Problem data model: block structure, separable terms, coupling
//! constraints, extended norms and residual-maintaining state.

mod composite;
mod coupling;
mod partition;
mod separable;
mod state;

pub use composite::{
    alpha_dual_norm, alpha_norm, eval_objective, CompositeProblem, StructuredSmooth,
};
pub use coupling::{Coupling, DenseMatrix};
pub use partition::BlockPartition;
pub use separable::{SeparableTerm, TermKind};
pub use state::{BlockDirection, SolverState};
