//! Sparsity response of the l1-regularized random family: sweeping the
//! penalty weight shrinks the support of the solution.

use coupled_descent::apps::build_l1_random;
use coupled_descent::solvers::{rcd_solve, Algorithm, SolverConfig, StopRule};

fn main() {
    let n = 200;
    let m_dim = 10;
    println!("random dense instance, n = {n}, m = {m_dim}, constraint e'x = 1, box [-1, 1]\n");
    println!(
        "{:>8} {:>14} {:>10} {:>12}",
        "lambda", "objective", "support", "raw iters"
    );
    for lambda in [0.0, 0.1, 1.0, 10.0] {
        let (problem, _, uniform) = build_l1_random(n, m_dim, lambda, 99, 0.0).unwrap();
        let config = SolverConfig::new(Algorithm::Rcd)
            .with_seed(4)
            .with_epsilon(1e-12)
            .with_max_full_iterations(50_000)
            .with_stop_rule(StopRule::PlateauWindow { window: 20 });
        let out = rcd_solve(&problem, &uniform, &config).unwrap();
        let support = out.x.iter().filter(|v| v.abs() > 1e-6).count();
        println!(
            "{:>8} {:>14.6} {:>10} {:>12}",
            lambda,
            out.objective(),
            support,
            out.raw_iterations
        );
    }
    println!("\nstronger penalties collapse the support to a handful of coordinates.");
}
