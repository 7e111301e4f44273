//! Reproducible experiment harness: manifests, multi-seed runs, trace and
//! summary CSVs, cross-seed aggregation and rate fitting.
//!
//! Output layout for a manifest with solvers `s0..` and seeds `k0..`:
//!
//! - `trace_s<i>_<algo>_seed<k>.csv` — one per (solver, seed) cell with
//!   columns `full_iteration,raw_iterations,objective,feasibility_defect`.
//! - `summary.csv` — one row per cell (includes wall time and status).
//! - `aggregate_s<i>_<algo>.csv` — per-row objective mean/min/max across
//!   seeds, written when the manifest lists two or more seeds.
//!
//! Trace and aggregate files are deterministic functions of the manifest;
//! wall-clock timing appears only in `summary.csv`. Floats are printed with
//! 17 significant digits so files round-trip losslessly.

mod fit;

pub use fit::{final_decade, fit_rate, RateFit};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::apps::{
    build_chebyshev, build_l1_random, build_sparse_qp, build_svm, parse_sparse_dataset,
};
use crate::error::{Error, Result};
use crate::problem::{alpha_norm, CompositeProblem, Coupling};
use crate::solvers::{solve, Algorithm, ConvergenceTrace, SolveOutcome, SolverConfig, StopRule};

/// Initial point selector shared by the experiment families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartPoint {
    /// `x0 = 0` (SVM dual).
    Zero,
    /// First unit vector.
    E1,
    /// `e / n`.
    Uniform,
}

impl FromStr for StartPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(StartPoint::Zero),
            "e1" => Ok(StartPoint::E1),
            "uniform" => Ok(StartPoint::Uniform),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown start point `{other}` (zero|e1|uniform)"),
            }),
        }
    }
}

impl fmt::Display for StartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StartPoint::Zero => "zero",
            StartPoint::E1 => "e1",
            StartPoint::Uniform => "uniform",
        };
        f.write_str(name)
    }
}

/// Problem family plus its generation parameters.
#[derive(Clone, Debug)]
pub enum Family {
    Svm { data: PathBuf, c: f64 },
    Chebyshev { n: usize, m_dim: usize, gen_seed: u64 },
    L1 { n: usize, m_dim: usize, lambda: f64, gen_seed: u64 },
    /// Sparse box/l1 quadratic with an exact per-column nonzero count.
    Custom { n: usize, m_rows: usize, p: usize, lambda: f64, gen_seed: u64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Svm { .. } => "svm",
            Family::Chebyshev { .. } => "chebyshev",
            Family::L1 { .. } => "l1",
            Family::Custom { .. } => "custom",
        }
    }

    /// Builds the problem and the requested start point.
    pub fn build(&self, x0: StartPoint, alpha: f64) -> Result<(CompositeProblem, Vec<f64>)> {
        match self {
            Family::Svm { data, c } => {
                let instance = parse_sparse_dataset(data)?;
                let (problem, zero) = build_svm(&instance, *c, alpha)?;
                match x0 {
                    StartPoint::Zero => Ok((problem, zero)),
                    other => Err(Error::InvalidProblem(format!(
                        "svm family starts at zero, not `{other}`"
                    ))),
                }
            }
            Family::Chebyshev { n, m_dim, gen_seed } => {
                let instance =
                    crate::apps::ChebyshevInstance::random(*n, *m_dim, *gen_seed)?;
                let (problem, e1, uniform) = build_chebyshev(&instance, alpha)?;
                pick_simplex_start(problem, e1, uniform, x0)
            }
            Family::L1 { n, m_dim, lambda, gen_seed } => {
                let (problem, e1, uniform) =
                    build_l1_random(*n, *m_dim, *lambda, *gen_seed, alpha)?;
                pick_simplex_start(problem, e1, uniform, x0)
            }
            Family::Custom { n, m_rows, p, lambda, gen_seed } => {
                let (problem, e1, uniform) =
                    build_sparse_qp(*n, *m_rows, *p, *lambda, *gen_seed, alpha)?;
                pick_simplex_start(problem, e1, uniform, x0)
            }
        }
    }
}

fn pick_simplex_start(
    problem: CompositeProblem,
    e1: Vec<f64>,
    uniform: Vec<f64>,
    x0: StartPoint,
) -> Result<(CompositeProblem, Vec<f64>)> {
    match x0 {
        StartPoint::E1 => Ok((problem, e1)),
        StartPoint::Uniform => Ok((problem, uniform)),
        StartPoint::Zero => Err(Error::InvalidProblem(
            "zero start is infeasible for simplex-coupled families".into(),
        )),
    }
}

/// A full experiment: one problem family, a list of solver configurations,
/// a list of seeds, and an output directory.
#[derive(Clone, Debug)]
pub struct ExperimentManifest {
    pub family: Family,
    pub x0: StartPoint,
    pub solvers: Vec<SolverConfig>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub jobs: usize,
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::InvalidProblem("manifest lists no solvers".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidProblem("manifest lists no seeds".into()));
        }
        if let Family::Svm { data, .. } = &self.family {
            if !data.exists() {
                return Err(Error::InvalidProblem(format!(
                    "dataset `{}` does not exist",
                    data.display()
                )));
            }
        }
        Ok(())
    }
}

/// Parses the plain-text key-value manifest format.
///
/// ```text
/// family = l1
/// n = 200
/// m_dim = 10
/// lambda = 0.1
/// gen_seed = 7
/// x0 = uniform
/// algos = rcd, cgd
/// alpha = 0
/// eps = 1e-5
/// window = 10
/// max_full_iters = 300
/// trace_every = 1
/// seeds = 1, 2, 3
/// out = results
/// jobs = 2
/// ```
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<ExperimentManifest> {
    let mut kv: Vec<(usize, String, String)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, found `{trimmed}`"),
            });
        };
        kv.push((line_no, key.trim().to_string(), value.trim().to_string()));
    }
    let find = |key: &str| kv.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()));
    let parse_num = |key: &str, default: Option<f64>| -> Result<f64> {
        match find(key) {
            Some((line, v)) => v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{key}` value `{v}` is not a number"),
            }),
            None => default.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing required key `{key}`"),
            }),
        }
    };
    let parse_usize = |key: &str, default: Option<usize>| -> Result<usize> {
        parse_num(key, default.map(|v| v as f64)).map(|v| v as usize)
    };

    let (family_line, family_name) = find("family").ok_or(Error::Parse {
        line: 0,
        message: "missing required key `family`".into(),
    })?;
    let family = match family_name {
        "svm" => {
            let (line, data) = find("data").ok_or(Error::Parse {
                line: family_line,
                message: "svm family needs `data = <path>`".into(),
            })?;
            let _ = line;
            let mut path = PathBuf::from(data);
            if path.is_relative() {
                path = base_dir.join(path);
            }
            Family::Svm {
                data: path,
                c: parse_num("c", Some(1.0))?,
            }
        }
        "chebyshev" => Family::Chebyshev {
            n: parse_usize("n", None)?,
            m_dim: parse_usize("m_dim", None)?,
            gen_seed: parse_num("gen_seed", Some(0.0))? as u64,
        },
        "l1" => Family::L1 {
            n: parse_usize("n", None)?,
            m_dim: parse_usize("m_dim", None)?,
            lambda: parse_num("lambda", Some(0.1))?,
            gen_seed: parse_num("gen_seed", Some(0.0))? as u64,
        },
        "custom" => Family::Custom {
            n: parse_usize("n", None)?,
            m_rows: parse_usize("m_rows", None)?,
            p: parse_usize("p", Some(5))?,
            lambda: parse_num("lambda", Some(0.0))?,
            gen_seed: parse_num("gen_seed", Some(0.0))? as u64,
        },
        other => {
            return Err(Error::Parse {
                line: family_line,
                message: format!("unknown family `{other}` (svm|chebyshev|l1|custom)"),
            })
        }
    };

    let x0 = match find("x0") {
        Some((line, v)) => v.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad x0 `{v}`"),
        })?,
        None => match family {
            Family::Svm { .. } => StartPoint::Zero,
            _ => StartPoint::Uniform,
        },
    };

    let (algos_line, algos_str) = find("algos").ok_or(Error::Parse {
        line: 0,
        message: "missing required key `algos`".into(),
    })?;
    let alpha = parse_num("alpha", Some(0.0))?;
    let eps = parse_num("eps", Some(1e-5))?;
    let window = parse_usize("window", Some(10))?;
    let max_full = parse_num("max_full_iters", Some(10_000.0))? as u64;
    let trace_every = parse_num("trace_every", Some(1.0))? as u64;
    let stop_rule = match (find("f_star"), find("gap")) {
        (Some((_, f)), Some((_, g))) => StopRule::GapToReference {
            f_star: f.parse().map_err(|_| Error::Parse {
                line: 0,
                message: "bad f_star".into(),
            })?,
            gap: g.parse().map_err(|_| Error::Parse {
                line: 0,
                message: "bad gap".into(),
            })?,
        },
        _ => StopRule::PlateauWindow { window },
    };
    let mut solvers = Vec::new();
    for name in algos_str.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let algorithm: Algorithm = name.parse().map_err(|_| Error::Parse {
            line: algos_line,
            message: format!("unknown algorithm `{name}`"),
        })?;
        solvers.push(
            SolverConfig::new(algorithm)
                .with_alpha(alpha)
                .with_epsilon(eps)
                .with_max_full_iterations(max_full)
                .with_trace_every(trace_every)
                .with_stop_rule(stop_rule),
        );
    }

    let seeds = match find("seeds") {
        Some((line, v)) => {
            let mut seeds = Vec::new();
            for tok in v.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                seeds.push(tok.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("seed `{tok}` is not an integer"),
                })?);
            }
            seeds
        }
        None => vec![0],
    };

    let out_dir = {
        let (_, v) = find("out").ok_or(Error::Parse {
            line: 0,
            message: "missing required key `out`".into(),
        })?;
        let mut path = PathBuf::from(v);
        if path.is_relative() {
            path = base_dir.join(path);
        }
        path
    };
    let jobs = parse_usize("jobs", Some(1))?.max(1);

    let manifest = ExperimentManifest {
        family,
        x0,
        solvers,
        seeds,
        out_dir,
        jobs,
    };
    manifest.validate()?;
    Ok(manifest)
}

/// Reads and parses a manifest file; relative paths resolve against the
/// manifest's directory.
pub fn parse_manifest_file(path: &Path) -> Result<ExperimentManifest> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base)
}

/// One row of `summary.csv`.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub algorithm: String,
    pub seed: u64,
    pub full_iterations: f64,
    pub raw_iterations: u64,
    pub objective: f64,
    pub feasibility: f64,
    pub elapsed_seconds: f64,
    pub status: String,
    /// Diagnostic level-set size estimate: `||x0 - x_final||_alpha`.
    pub r_alpha_estimate: f64,
}

/// Everything a finished experiment produced.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub summaries: Vec<RunSummary>,
    pub trace_files: Vec<PathBuf>,
    pub aggregate_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
    /// Outcomes in cell order (None for failed cells).
    pub outcomes: Vec<Option<SolveOutcome>>,
}

fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn write_trace_csv(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    let mut out = String::from("full_iteration,raw_iterations,objective,feasibility_defect\n");
    for row in &trace.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(row.full_iteration),
            row.raw_iterations,
            fmt_float(row.objective),
            fmt_float(row.feasibility_defect)
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Runs every (solver, seed) cell, writes traces, summary and aggregates.
pub fn run_experiment(manifest: &ExperimentManifest) -> Result<ExperimentReport> {
    manifest.validate()?;
    let alpha = manifest
        .solvers
        .first()
        .map(|s| s.alpha)
        .unwrap_or(0.0);
    let (problem, x0) = manifest.family.build(manifest.x0, alpha)?;
    // The (m+1)-block solver needs the general coupling form.
    let needs_general = manifest
        .solvers
        .iter()
        .any(|s| s.algorithm == Algorithm::RcdN);
    let problem_general = if needs_general
        && matches!(problem.coupling(), Coupling::Single { .. })
    {
        Some(CompositeProblem::new(
            problem.smooth().clone(),
            problem.nonsmooth().clone(),
            problem.coupling().to_general()?,
            problem.partition().clone(),
            problem.alpha(),
        )?)
    } else {
        None
    };

    struct Cell {
        solver_idx: usize,
        config: SolverConfig,
    }
    let mut cells = Vec::new();
    for (solver_idx, solver) in manifest.solvers.iter().enumerate() {
        for &seed in &manifest.seeds {
            cells.push(Cell {
                solver_idx,
                config: solver.clone().with_seed(seed),
            });
        }
    }

    let results: Mutex<Vec<Option<std::result::Result<SolveOutcome, String>>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = manifest.jobs.min(cells.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cells.len() {
                    break;
                }
                let cell = &cells[idx];
                let prob = if cell.config.algorithm == Algorithm::RcdN {
                    problem_general.as_ref().unwrap_or(&problem)
                } else {
                    &problem
                };
                let outcome = solve(prob, &x0, &cell.config).map_err(|e| e.to_string());
                results.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });
    let results = results.into_inner().unwrap();

    fs::create_dir_all(&manifest.out_dir)?;
    let mut summaries = Vec::new();
    let mut trace_files = Vec::new();
    let mut outcomes: Vec<Option<SolveOutcome>> = Vec::new();
    for (cell, result) in cells.iter().zip(results) {
        let algo = cell.config.algorithm.to_string();
        match result.expect("worker finished") {
            Ok(outcome) => {
                let path = manifest.out_dir.join(format!(
                    "trace_s{}_{}_seed{}.csv",
                    cell.solver_idx, algo, cell.config.seed
                ));
                write_trace_csv(&path, &outcome.trace)?;
                trace_files.push(path);
                let last = outcome.trace.rows.last().expect("trace has rows");
                let r_alpha = {
                    let diff: Vec<f64> = x0
                        .iter()
                        .zip(&outcome.x)
                        .map(|(a, b)| a - b)
                        .collect();
                    alpha_norm(&problem, &diff)
                };
                summaries.push(RunSummary {
                    algorithm: algo,
                    seed: cell.config.seed,
                    full_iterations: last.full_iteration,
                    raw_iterations: last.raw_iterations,
                    objective: last.objective,
                    feasibility: last.feasibility_defect,
                    elapsed_seconds: last.elapsed_seconds,
                    status: "ok".to_string(),
                    r_alpha_estimate: r_alpha,
                });
                outcomes.push(Some(outcome));
            }
            Err(message) => {
                summaries.push(RunSummary {
                    algorithm: algo,
                    seed: cell.config.seed,
                    full_iterations: f64::NAN,
                    raw_iterations: 0,
                    objective: f64::NAN,
                    feasibility: f64::NAN,
                    elapsed_seconds: f64::NAN,
                    status: format!("error: {}", message.replace(',', ";")),
                    r_alpha_estimate: f64::NAN,
                });
                outcomes.push(None);
            }
        }
    }

    let summary_file = manifest.out_dir.join("summary.csv");
    {
        let mut out = String::from(
            "algorithm,seed,full_iterations,raw_iterations,objective,feasibility,elapsed_seconds,status\n",
        );
        for s in &summaries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.algorithm,
                s.seed,
                fmt_float(s.full_iterations),
                s.raw_iterations,
                fmt_float(s.objective),
                fmt_float(s.feasibility),
                fmt_float(s.elapsed_seconds),
                s.status
            ));
        }
        fs::write(&summary_file, out)?;
    }

    // Cross-seed aggregates (the expected-objective estimate).
    let mut aggregate_files = Vec::new();
    if manifest.seeds.len() >= 2 {
        for (solver_idx, solver) in manifest.solvers.iter().enumerate() {
            let traces: Vec<&ConvergenceTrace> = outcomes
                .iter()
                .enumerate()
                .filter(|(i, _)| cells[*i].solver_idx == solver_idx)
                .filter_map(|(_, o)| o.as_ref().map(|o| &o.trace))
                .collect();
            if traces.len() < 2 {
                continue;
            }
            let (ks, mean, min, max) = aggregate_objective(&traces);
            let path = manifest
                .out_dir
                .join(format!("aggregate_s{}_{}.csv", solver_idx, solver.algorithm));
            let mut out =
                String::from("full_iteration,mean_objective,min_objective,max_objective\n");
            for i in 0..ks.len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_float(ks[i]),
                    fmt_float(mean[i]),
                    fmt_float(min[i]),
                    fmt_float(max[i])
                ));
            }
            fs::write(&path, out)?;
            aggregate_files.push(path);
        }
    }

    Ok(ExperimentReport {
        summaries,
        trace_files,
        aggregate_files,
        summary_file,
        outcomes,
    })
}

/// Row-aligned objective statistics across traces, truncated to the
/// shortest trace.
pub fn aggregate_objective(
    traces: &[&ConvergenceTrace],
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let rows = traces.iter().map(|t| t.rows.len()).min().unwrap_or(0);
    let mut ks = Vec::with_capacity(rows);
    let mut mean = Vec::with_capacity(rows);
    let mut min = Vec::with_capacity(rows);
    let mut max = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut acc = 0.0;
        for t in traces {
            let v = t.rows[r].objective;
            acc += v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        ks.push(traces[0].rows[r].full_iteration);
        mean.push(acc / traces.len() as f64);
        min.push(lo);
        max.push(hi);
    }
    (ks, mean, min, max)
}
