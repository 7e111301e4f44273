//! Iterative algorithms: randomized two-block descent (RCD), its
//! (m+1)-block generalization (RCD_N), Gauss-Southwell coordinate gradient
//! descent (CGD) and the full composite gradient method (GM).
//!
//! One solver run is single-threaded and owns its `SolverState`; the
//! problem is shared immutably, so multi-seed experiments may run
//! concurrently over one instance.

mod cgd;
mod gm;
mod rcd;
mod rcdn;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Coupling};

pub use cgd::cgd_solve;
pub use gm::gm_solve;
pub use rcd::rcd_solve;
pub use rcdn::rcd_n_solve;

/// Which iterative method to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Rcd,
    RcdN,
    Cgd,
    Gm,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Algorithm::Rcd => "rcd",
            Algorithm::RcdN => "rcdn",
            Algorithm::Cgd => "cgd",
            Algorithm::Gm => "gm",
        };
        f.write_str(name)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rcd" => Ok(Algorithm::Rcd),
            "rcdn" => Ok(Algorithm::RcdN),
            "cgd" => Ok(Algorithm::Cgd),
            "gm" => Ok(Algorithm::Gm),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown algorithm `{other}` (rcd|rcdn|cgd|gm)"),
            }),
        }
    }
}

/// Termination rule, evaluated at trace rows.
#[derive(Clone, Copy, Debug)]
pub enum StopRule {
    /// Stop once `window + 1` consecutive recorded decreases are all
    /// `<= epsilon`.
    PlateauWindow { window: usize },
    /// Stop once `F(x) - f_star <= gap`.
    GapToReference { f_star: f64, gap: f64 },
}

/// Run parameters shared by all four algorithms.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Exponent of the extended norm; must match the problem's.
    pub alpha: f64,
    /// Decrease threshold used by the plateau rule.
    pub epsilon: f64,
    pub max_full_iterations: u64,
    pub seed: u64,
    pub stop_rule: StopRule,
    /// Trace row stride, in full iterations.
    pub trace_every: u64,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            alpha: 0.0,
            epsilon: 1e-5,
            max_full_iterations: 10_000,
            seed: 0,
            stop_rule: StopRule::PlateauWindow { window: 10 },
            trace_every: 1,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_full_iterations(mut self, iters: u64) -> Self {
        self.max_full_iterations = iters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stop_rule(mut self, rule: StopRule) -> Self {
        self.stop_rule = rule;
        self
    }

    pub fn with_trace_every(mut self, stride: u64) -> Self {
        self.trace_every = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidProblem(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        if self.trace_every == 0 {
            return Err(Error::InvalidProblem("trace_every must be >= 1".into()));
        }
        if let StopRule::PlateauWindow { window } = self.stop_rule {
            if window < 1 {
                return Err(Error::InvalidProblem("plateau window must be >= 1".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidProblem(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Plateau,
    GapReached,
    MaxFullIterations,
    /// The projected direction vanished (already optimal).
    Stationary,
}

/// One logged trace point.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub full_iteration: f64,
    pub raw_iterations: u64,
    pub objective: f64,
    pub feasibility_defect: f64,
    pub elapsed_seconds: f64,
}

/// Per-run convergence log.
#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    pub seed: u64,
    /// Nonzeros touched while computing coordinate derivatives.
    pub coordinate_touches: u64,
}

impl ConvergenceTrace {
    pub fn final_objective(&self) -> f64 {
        self.rows.last().map(|r| r.objective).unwrap_or(f64::NAN)
    }
}

/// Result of one solver run.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub trace: ConvergenceTrace,
    pub stop: StopReason,
    pub raw_iterations: u64,
}

impl SolveOutcome {
    pub fn objective(&self) -> f64 {
        self.trace.final_objective()
    }
}

/// Shared trace/stopping machinery. Rows are recorded every
/// `stride_raw` raw iterations; the stopping rule is evaluated on rows.
pub(crate) struct Recorder {
    rows: Vec<TraceRow>,
    raw_per_full: f64,
    stride_raw: u64,
    max_raw: u64,
    epsilon: f64,
    stop_rule: StopRule,
    consecutive_small: usize,
    start: Instant,
}

impl Recorder {
    pub fn start(
        config: &SolverConfig,
        raw_per_full: f64,
        objective: f64,
        defect: f64,
    ) -> Recorder {
        let stride_raw = ((raw_per_full.floor() as u64).max(1)) * config.trace_every;
        let max_raw = ((config.max_full_iterations as f64) * raw_per_full).ceil() as u64;
        let mut rec = Recorder {
            rows: Vec::new(),
            raw_per_full,
            stride_raw,
            max_raw: max_raw.max(1),
            epsilon: config.epsilon,
            stop_rule: config.stop_rule,
            consecutive_small: 0,
            start: Instant::now(),
        };
        rec.push_row(0, objective, defect);
        rec
    }

    pub fn max_raw(&self) -> u64 {
        self.max_raw
    }

    fn push_row(&mut self, raw: u64, objective: f64, defect: f64) {
        self.rows.push(TraceRow {
            full_iteration: raw as f64 / self.raw_per_full,
            raw_iterations: raw,
            objective,
            feasibility_defect: defect,
            elapsed_seconds: self.start.elapsed().as_secs_f64(),
        });
    }

    /// Records a row if `raw` is on the stride and evaluates the stop rule.
    pub fn observe(&mut self, raw: u64, objective: f64, defect: f64) -> Option<StopReason> {
        if !raw.is_multiple_of(self.stride_raw) {
            return None;
        }
        let prev = self.rows.last().map(|r| r.objective).unwrap_or(f64::INFINITY);
        self.push_row(raw, objective, defect);
        match self.stop_rule {
            StopRule::GapToReference { f_star, gap } => {
                if objective - f_star <= gap {
                    return Some(StopReason::GapReached);
                }
            }
            StopRule::PlateauWindow { window } => {
                let decrease = prev - objective;
                if decrease <= self.epsilon {
                    self.consecutive_small += 1;
                } else {
                    self.consecutive_small = 0;
                }
                if self.consecutive_small > window {
                    return Some(StopReason::Plateau);
                }
            }
        }
        None
    }

    /// Closes the trace, appending a final row when the run stopped
    /// between strides.
    pub fn finish(
        mut self,
        raw: u64,
        objective: f64,
        defect: f64,
        seed: u64,
        coordinate_touches: u64,
    ) -> ConvergenceTrace {
        if self.rows.last().map(|r| r.raw_iterations) != Some(raw) {
            self.push_row(raw, objective, defect);
        }
        ConvergenceTrace {
            rows: self.rows,
            seed,
            coordinate_touches,
        }
    }
}

/// Start-point feasibility shared by all solvers: coupling defect within
/// `1e-9 * (1 + |b| + ||A|| ||x0||)` and finite `h(x0)`.
pub(crate) fn validate_start(problem: &CompositeProblem, x0: &[f64]) -> Result<()> {
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "initial point",
            expected: problem.dim(),
            got: x0.len(),
        });
    }
    let defect = problem.coupling().defect(x0);
    let x_norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (row_norm, b_mag) = match problem.coupling() {
        Coupling::Single { a, b } => (a.iter().map(|v| v * v).sum::<f64>().sqrt(), b.abs()),
        Coupling::General { a_mat, b } => {
            let rn = (0..a_mat.nrows())
                .map(|r| a_mat.row(r).iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(0.0_f64, f64::max);
            (rn, b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
        }
    };
    let scale = 1.0 + b_mag + row_norm * x_norm;
    if defect > 1e-9 * scale {
        return Err(Error::InfeasibleStart { defect });
    }
    if problem.nonsmooth().eval(x0) == f64::INFINITY {
        return Err(Error::InfeasibleStart {
            defect: f64::INFINITY,
        });
    }
    Ok(())
}

/// Solvers derive their model weights from the problem's alpha; the config
/// must agree so traces mean what the caller thinks they mean.
pub(crate) fn validate_alpha(problem: &CompositeProblem, config: &SolverConfig) -> Result<()> {
    if (problem.alpha() - config.alpha).abs() > 1e-12 {
        return Err(Error::UnsupportedConfiguration(format!(
            "config alpha {} differs from problem alpha {}",
            config.alpha,
            problem.alpha()
        )));
    }
    Ok(())
}

/// Dispatches on `config.algorithm`.
pub fn solve(
    problem: &CompositeProblem,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    match config.algorithm {
        Algorithm::Rcd => rcd_solve(problem, x0, config),
        Algorithm::RcdN => rcd_n_solve(problem, x0, config),
        Algorithm::Cgd => cgd_solve(problem, x0, config),
        Algorithm::Gm => gm_solve(problem, x0, config),
    }
}
