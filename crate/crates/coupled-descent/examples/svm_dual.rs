//! Linear SVM dual solved by randomized pair descent and by greedy
//! coordinate gradient descent.
//!
//! With a path argument it loads that svmlight/LIBSVM file:
//!
//! ```bash
//! cargo run --release --example svm_dual -- path/to/a7a
//! ```
//!
//! Without arguments it writes a synthetic sparse dataset of the same
//! shape as the `a7a` benchmark (16100 examples, 123 features, ~14
//! nonzeros per example) to the target directory, parses it back and
//! solves that instead.

use std::io::Write;
use std::path::PathBuf;

use coupled_descent::apps::{build_svm, parse_sparse_dataset};
use coupled_descent::rng::Xoshiro256PlusPlus;
use coupled_descent::solvers::{cgd_solve, rcd_solve, Algorithm, SolverConfig, StopRule};

fn synthesize_dataset(path: &PathBuf) {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(20_240_101);
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).unwrap());
    for _ in 0..16_100 {
        let label = if rng.next_f64() < 0.5 { -1 } else { 1 };
        write!(file, "{label}").unwrap();
        let nnz = 10 + rng.next_below(9); // ~14 on average
        let mut features = coupled_descent::rng::sample_distinct(&mut rng, 123, nnz);
        features.sort_unstable();
        for f in features {
            write!(file, " {}:{:.4}", f + 1, rng.uniform(0.1, 1.0) * label as f64).unwrap();
        }
        writeln!(file).unwrap();
    }
}

fn main() {
    let path = match std::env::args().nth(1) {
        Some(arg) => PathBuf::from(arg),
        None => {
            let path = std::env::temp_dir().join("coupled_descent_synthetic.svm");
            println!("no dataset given; writing a synthetic one to {}", path.display());
            synthesize_dataset(&path);
            path
        }
    };

    let t0 = std::time::Instant::now();
    let instance = parse_sparse_dataset(&path).expect("parse dataset");
    println!(
        "parsed {} examples, {} features, avg {:.1} nonzeros/example ({} label warnings) in {:.2}s",
        instance.num_examples(),
        instance.num_features(),
        instance.avg_col_nnz(),
        instance.label_warnings(),
        t0.elapsed().as_secs_f64()
    );

    let (problem, x0) = build_svm(&instance, 1.0, 0.0).expect("build dual");

    let rcd_cfg = SolverConfig::new(Algorithm::Rcd)
        .with_seed(42)
        .with_epsilon(1e-5)
        .with_max_full_iterations(100_000)
        .with_stop_rule(StopRule::PlateauWindow { window: 10 });
    let rcd = rcd_solve(&problem, &x0, &rcd_cfg).expect("rcd run");
    let last = rcd.trace.rows.last().unwrap();
    println!(
        "rcd : objective {:.4} after {:.0} full iterations ({} raw) in {:.1}s [{:?}]",
        rcd.objective(),
        last.full_iteration,
        rcd.raw_iterations,
        last.elapsed_seconds,
        rcd.stop
    );

    let cgd_cfg = SolverConfig::new(Algorithm::Cgd)
        .with_epsilon(1e-5)
        .with_max_full_iterations(400_000)
        .with_stop_rule(StopRule::PlateauWindow { window: 1 });
    let cgd = cgd_solve(&problem, &x0, &cgd_cfg).expect("cgd run");
    let last = cgd.trace.rows.last().unwrap();
    println!(
        "cgd : objective {:.4} after {} iterations in {:.1}s [{:?}]",
        cgd.objective(),
        cgd.raw_iterations,
        last.elapsed_seconds,
        cgd.stop
    );

    let support = rcd.x.iter().filter(|v| **v > 1e-8).count();
    let bounded = rcd.x.iter().filter(|v| **v > 1.0 - 1e-8).count();
    println!("rcd support vectors: {support} ({bounded} at the box bound)");
}
