//! Empirical convergence-rate shapes of randomized pair descent.
//!
//! Two instances, two regimes:
//! - a rank-deficient sparse quadratic over a box, observed during its
//!   sublinear phase: the multi-seed mean gap decays like 1/k (log-log
//!   slope near -1);
//! - a well-conditioned strongly convex quadratic: the gap decays
//!   geometrically (log(gap) affine in the iteration count, R^2 near 1).
//!
//! Run with `cargo run --release --example convergence_rates`.

use coupled_descent::apps::build_sparse_qp;
use coupled_descent::experiment::{aggregate_objective, final_decade, fit_rate};
use coupled_descent::problem::{
    eval_objective, BlockPartition, CompositeProblem, Coupling, SeparableTerm, StructuredSmooth,
};
use coupled_descent::rng::Xoshiro256PlusPlus;
use coupled_descent::solvers::{cgd_solve, rcd_solve, Algorithm, SolverConfig, StopRule};
use coupled_descent::sparse::CscMatrix;

fn main() {
    let never = StopRule::GapToReference {
        f_star: f64::NEG_INFINITY,
        gap: 0.0,
    };

    // --- Sublinear regime -------------------------------------------------
    // Sparse rank-deficient quadratic (500 coordinates, 50 rows): active-set
    // identification eventually turns the decay linear, so the horizon is
    // chosen inside the 1/k phase.
    let (problem, e1, _) = build_sparse_qp(500, 50, 10, 0.0, 7, 0.0).unwrap();
    println!("computing the reference optimum with a long greedy run...");
    let cgd_cfg = SolverConfig::new(Algorithm::Cgd)
        .with_epsilon(1e-14)
        .with_max_full_iterations(600_000);
    let reference = cgd_solve(&problem, &e1, &cgd_cfg).unwrap();
    let f_star = reference.objective();
    println!(
        "  f* = {f_star:.9} after {} greedy iterations",
        reference.raw_iterations
    );

    let traces: Vec<_> = (1..=20)
        .map(|seed| {
            let cfg = SolverConfig::new(Algorithm::Rcd)
                .with_seed(seed)
                .with_max_full_iterations(2_000)
                .with_trace_every(2)
                .with_stop_rule(never);
            rcd_solve(&problem, &e1, &cfg).unwrap().trace
        })
        .collect();
    let trace_refs: Vec<&_> = traces.iter().collect();
    let (ks, mean, _, _) = aggregate_objective(&trace_refs);
    let rows: Vec<(f64, f64)> = ks
        .iter()
        .zip(&mean)
        .filter(|(k, m)| **k > 0.0 && **m - f_star > 0.0)
        .map(|(k, m)| (*k, m - f_star))
        .collect();
    let window = final_decade(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let ks_w: Vec<f64> = rows[window.clone()].iter().map(|r| r.0).collect();
    let gaps_w: Vec<f64> = rows[window].iter().map(|r| r.1).collect();
    let fit = fit_rate(&ks_w, &gaps_w).unwrap();
    println!(
        "rank-deficient instance: 20-seed mean-gap log-log slope = {:.3} over k in [{:.0}, {:.0}]",
        fit.loglog_slope,
        ks_w[0],
        ks_w[ks_w.len() - 1]
    );
    println!(
        "  (gap {:.3e} -> {:.3e})",
        gaps_w[0],
        gaps_w[gaps_w.len() - 1]
    );

    // --- Linear regime ----------------------------------------------------
    // Diagonal strongly convex instance with a closed-form optimum:
    // min 1/2 sum lambda_i x_i^2 + q_i x_i  s.t.  sum x_i = 1.
    let n = 200;
    let cond = 4.0;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
    let lambdas: Vec<f64> = (0..n)
        .map(|i| 1.0 + (cond - 1.0) * i as f64 / (n - 1) as f64)
        .collect();
    let q: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let triplets: Vec<(usize, usize, f64)> = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| (i, i, l.sqrt()))
        .collect();
    let z = CscMatrix::from_triplets(n, n, &triplets).unwrap();
    let problem = CompositeProblem::new(
        StructuredSmooth::new(z, q.clone()).unwrap(),
        SeparableTerm::zero(),
        Coupling::single(vec![1.0; n], 1.0),
        BlockPartition::scalar(n).unwrap(),
        0.0,
    )
    .unwrap()
    .with_strong_convexity(1.0);
    // KKT in closed form: x_i = -(q_i + mu) / lambda_i with mu from the sum.
    let inv_sum: f64 = lambdas.iter().map(|l| 1.0 / l).sum();
    let q_over: f64 = q.iter().zip(&lambdas).map(|(qi, li)| qi / li).sum();
    let mu = -(1.0 + q_over) / inv_sum;
    let f_star: f64 = lambdas
        .iter()
        .zip(&q)
        .map(|(li, qi)| {
            let xi = -(qi + mu) / li;
            0.5 * li * xi * xi + qi * xi
        })
        .sum();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;

    let gap0 = eval_objective(&problem, &e1).unwrap() - f_star;
    let traces: Vec<_> = (1..=20)
        .map(|seed| {
            let cfg = SolverConfig::new(Algorithm::Rcd)
                .with_seed(seed)
                .with_max_full_iterations(400_000)
                .with_trace_every(1)
                .with_stop_rule(StopRule::GapToReference {
                    f_star,
                    gap: 1e-8 * gap0,
                });
            rcd_solve(&problem, &e1, &cfg).unwrap().trace
        })
        .collect();
    let trace_refs: Vec<&_> = traces.iter().collect();
    let (ks, mean, _, _) = aggregate_objective(&trace_refs);
    let mut ks_w = Vec::new();
    let mut gaps_w = Vec::new();
    for (k, m) in ks.iter().zip(&mean) {
        let gap = m - f_star;
        if *k > 0.0 && gap > 1e-7 * gap0 {
            ks_w.push(*k);
            gaps_w.push(gap);
        }
    }
    let fit = fit_rate(&ks_w, &gaps_w).unwrap();
    println!(
        "strongly convex instance: R^2 of log(gap) vs k = {:.5} over {} rows ({:.1} decades)",
        fit.linear_r2,
        ks_w.len(),
        (gaps_w[0] / gaps_w[gaps_w.len() - 1]).log10()
    );
}
