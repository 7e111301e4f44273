//! Experiment runner CLI.
//!
//! `coupled-descent solve --family {svm|chebyshev|l1} ... --out DIR`
//! runs one algorithm on one instance; `coupled-descent bench --manifest
//! PATH` runs a full multi-solver, multi-seed experiment. Exit codes:
//! 0 success, 2 parse/usage error, 3 solver error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use coupled_descent::error::Error;
use coupled_descent::experiment::{
    parse_manifest_file, run_experiment, ExperimentManifest, Family, StartPoint,
};
use coupled_descent::solvers::{Algorithm, SolverConfig, StopRule};

const USAGE: &str = "usage:
  coupled-descent solve --family {svm|chebyshev|l1} --algo {rcd|rcdn|cgd|gm} --out DIR
      [--data PATH] [--n N] [--m-dim M] [--lambda L] [--c C] [--gen-seed S]
      [--alpha {0|1}] [--eps F] [--seed U64] [--max-full-iters K]
      [--x0 {zero|e1|uniform}] [--window W] [--trace-every T]
  coupled-descent bench --manifest PATH [--jobs J]

exit codes: 0 success, 2 parse error, 3 solver error";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::from(0),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Parse { .. }
                | Error::InvalidProblem(_)
                | Error::DimensionMismatch { .. } => 2,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn run(args: &[String]) -> Result<(), Error> {
    let Some(command) = args.first() else {
        return Err(usage("missing command"));
    };
    match command.as_str() {
        "solve" => solve_command(&args[1..]),
        "bench" => bench_command(&args[1..]),
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err(usage(&format!("unknown command `{other}`"))),
    }
}

fn usage(message: &str) -> Error {
    Error::Parse {
        line: 0,
        message: format!("{message}\n{USAGE}"),
    }
}

struct Flags {
    pairs: Vec<(String, String)>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, Error> {
        let mut pairs = Vec::new();
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            let Some(name) = flag.strip_prefix("--") else {
                return Err(usage(&format!("unexpected argument `{flag}`")));
            };
            let Some(value) = it.next() else {
                return Err(usage(&format!("flag --{name} needs a value")));
            };
            pairs.push((name.to_string(), value.clone()));
        }
        Ok(Flags { pairs })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn required(&self, name: &str) -> Result<&str, Error> {
        self.get(name)
            .ok_or_else(|| usage(&format!("missing required flag --{name}")))
    }

    fn num<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T, Error> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| usage(&format!("flag --{name}: bad value `{v}`"))),
        }
    }
}

fn solve_command(args: &[String]) -> Result<(), Error> {
    let flags = Flags::parse(args)?;
    let family_name = flags.required("family")?;
    let out = PathBuf::from(flags.required("out")?);
    let algo: Algorithm = flags.required("algo")?.parse()?;
    let alpha: f64 = flags.num("alpha", 0.0)?;
    if alpha != 0.0 && alpha != 1.0 {
        return Err(usage("--alpha must be 0 or 1"));
    }
    let eps: f64 = flags.num("eps", 1e-5)?;
    let seed: u64 = flags.num("seed", 0)?;
    let max_full: u64 = flags.num("max-full-iters", 10_000)?;
    let window: usize = flags.num("window", 10)?;
    let trace_every: u64 = flags.num("trace-every", 1)?;
    let gen_seed: u64 = flags.num("gen-seed", 0)?;

    let family = match family_name {
        "svm" => Family::Svm {
            data: PathBuf::from(flags.required("data")?),
            c: flags.num("c", 1.0)?,
        },
        "chebyshev" => Family::Chebyshev {
            n: flags.num("n", 1000)?,
            m_dim: flags.num("m-dim", 10)?,
            gen_seed,
        },
        "l1" => Family::L1 {
            n: flags.num("n", 1000)?,
            m_dim: flags.num("m-dim", 10)?,
            lambda: flags.num("lambda", 0.1)?,
            gen_seed,
        },
        other => return Err(usage(&format!("unknown family `{other}`"))),
    };
    let x0 = match flags.get("x0") {
        Some(v) => v.parse()?,
        None => match family {
            Family::Svm { .. } => StartPoint::Zero,
            _ => StartPoint::Uniform,
        },
    };

    let config = SolverConfig::new(algo)
        .with_alpha(alpha)
        .with_epsilon(eps)
        .with_seed(seed)
        .with_max_full_iterations(max_full)
        .with_trace_every(trace_every)
        .with_stop_rule(StopRule::PlateauWindow { window });
    let manifest = ExperimentManifest {
        family,
        x0,
        solvers: vec![config],
        seeds: vec![seed],
        out_dir: out,
        jobs: 1,
    };
    report(&manifest)
}

fn bench_command(args: &[String]) -> Result<(), Error> {
    let flags = Flags::parse(args)?;
    let path = Path::new(flags.required("manifest")?);
    let mut manifest = parse_manifest_file(path)?;
    if let Some(jobs) = flags.get("jobs") {
        manifest.jobs = jobs
            .parse()
            .map_err(|_| usage(&format!("bad --jobs value `{jobs}`")))?;
    }
    report(&manifest)
}

fn report(manifest: &ExperimentManifest) -> Result<(), Error> {
    let out = run_experiment(manifest)?;
    println!(
        "{:<6} {:>6} {:>14} {:>12} {:>22} {:>12} {:>10}  status",
        "algo", "seed", "full-iters", "raw-iters", "objective", "feas", "secs"
    );
    let mut failed = false;
    for s in &out.summaries {
        println!(
            "{:<6} {:>6} {:>14.2} {:>12} {:>22.12e} {:>12.3e} {:>10.3} {}",
            s.algorithm,
            s.seed,
            s.full_iterations,
            s.raw_iterations,
            s.objective,
            s.feasibility,
            s.elapsed_seconds,
            s.status
        );
        failed |= s.status != "ok";
    }
    println!("wrote {}", out.summary_file.display());
    for f in out.trace_files.iter().chain(&out.aggregate_files) {
        println!("wrote {}", f.display());
    }
    if failed {
        return Err(Error::Invariant("at least one cell failed".into()));
    }
    Ok(())
}
