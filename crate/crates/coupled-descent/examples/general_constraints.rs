//! The (m+1)-block solver on problems with several coupling rows.
//!
//! With `m` equality constraints, no direction touching fewer than `m + 1`
//! coordinates can stay feasible, so each iteration samples an
//! (m+1)-tuple, restricts the constraint matrix to it and minimizes along
//! the one-dimensional null space.

use coupled_descent::problem::{
    BlockPartition, CompositeProblem, Coupling, DenseMatrix, SeparableTerm, StructuredSmooth,
};
use coupled_descent::rng::Xoshiro256PlusPlus;
use coupled_descent::solvers::{rcd_n_solve, Algorithm, SolverConfig};
use coupled_descent::sparse::CscMatrix;

fn main() {
    let n = 60;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(15);

    for m in [1usize, 2, 3] {
        // Dense well-conditioned quadratic with a box, m random coupling rows.
        let mut triplets = Vec::new();
        for c in 0..n {
            for r in 0..n {
                triplets.push((r, c, rng.uniform(-1.0, 1.0) / (n as f64).sqrt()));
            }
        }
        let z = CscMatrix::from_triplets(n, n, &triplets).unwrap();
        let q: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let a_rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect();
        let problem = CompositeProblem::new(
            StructuredSmooth::new(z, q).unwrap(),
            SeparableTerm::boxed(-1.0, 1.0).unwrap(),
            Coupling::general(DenseMatrix::from_rows(a_rows).unwrap(), vec![0.0; m]).unwrap(),
            BlockPartition::scalar(n).unwrap(),
            0.0,
        )
        .unwrap();

        let config = SolverConfig::new(Algorithm::RcdN)
            .with_seed(8)
            .with_epsilon(1e-11)
            .with_max_full_iterations(20_000);
        let out = rcd_n_solve(&problem, &vec![0.0; n], &config).unwrap();
        let last = out.trace.rows.last().unwrap();
        println!(
            "m = {m}: tuples of {} blocks -> objective {:>12.6} after {:>7} raw iterations, \
             constraint defect {:.1e} [{:?}]",
            m + 1,
            out.objective(),
            out.raw_iterations,
            last.feasibility_defect,
            out.stop
        );
    }
}
