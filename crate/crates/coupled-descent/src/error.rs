//! Error type shared across the crate.

use std::fmt;
use std::io;

/// Errors produced by problem construction, subproblem solvers, the
/// iterative algorithms and the experiment harness.
#[derive(Debug)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Problem data violates a structural invariant (empty partition,
    /// `l > u`, negative regularization weight, ...).
    InvalidProblem(String),
    /// A one-dimensional or block subproblem is unbounded below.
    Unbounded,
    /// The feasible set of a subproblem is empty.
    Infeasible(String),
    /// The starting point handed to a solver violates the coupling
    /// constraint or has infinite objective value.
    InfeasibleStart { defect: f64 },
    /// A vector expected to lie in the constraint null space does not.
    NotInNullSpace { residual: f64 },
    /// The requested algorithm does not support this problem shape.
    UnsupportedConfiguration(String),
    /// Primal recovery was attempted from a dual point that is too far
    /// from optimal (negative squared radius).
    NonConvergedDual { radicand: f64 },
    /// Text input (dataset or manifest) could not be parsed.
    Parse { line: usize, message: String },
    /// Rate fitting was asked to take logarithms of a nonpositive gap;
    /// the objective reference `f_star` needs to be tightened.
    NonPositiveGap { index: usize },
    /// Underlying I/O failure.
    Io(io::Error),
    /// An internal consistency check failed (stale residual, ...).
    Invariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, got {got}"),
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
            Error::Unbounded => write!(f, "subproblem is unbounded below"),
            Error::Infeasible(msg) => write!(f, "infeasible subproblem: {msg}"),
            Error::InfeasibleStart { defect } => {
                write!(f, "starting point infeasible (constraint defect {defect:.3e})")
            }
            Error::NotInNullSpace { residual } => {
                write!(f, "vector not in constraint null space (residual {residual:.3e})")
            }
            Error::UnsupportedConfiguration(msg) => write!(f, "unsupported configuration: {msg}"),
            Error::NonConvergedDual { radicand } => write!(
                f,
                "dual point not converged: squared radius {radicand:.3e} is negative"
            ),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::NonPositiveGap { index } => write!(
                f,
                "nonpositive gap at row {index}; provide a better f_star reference"
            ),
            Error::Io(err) => write!(f, "i/o error: {err}"),
            Error::Invariant(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
