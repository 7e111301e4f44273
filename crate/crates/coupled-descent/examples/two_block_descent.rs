//! Minimal tour: build a composite problem by hand, take one exact pair
//! direction, then let the randomized solver finish the job.
//!
//! The instance is `min 1/2 (x1^2 + x2^2)` subject to `x1 + x2 = 1`,
//! whose optimum is `(0.5, 0.5)`.

use coupled_descent::problem::{
    BlockPartition, CompositeProblem, Coupling, SeparableTerm, SolverState, StructuredSmooth,
};
use coupled_descent::solvers::{rcd_solve, Algorithm, SolverConfig};
use coupled_descent::sparse::CscMatrix;
use coupled_descent::subsolvers::two_block_direction;

fn main() {
    let z = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
    let problem = CompositeProblem::new(
        StructuredSmooth::new(z, vec![0.0, 0.0]).unwrap(),
        SeparableTerm::zero(),
        Coupling::single(vec![1.0, 1.0], 1.0),
        BlockPartition::scalar(2).unwrap(),
        0.0,
    )
    .unwrap();

    // One exact pair step from the feasible corner (1, 0).
    let x0 = vec![1.0, 0.0];
    let mut state = SolverState::new(&problem, &x0).unwrap();
    println!("start:      x = {:?},  F = {}", state.x(), state.objective());
    let direction = two_block_direction(&problem, &mut state, 0, 1).unwrap();
    state.apply_update(&problem, &direction);
    println!("after pair: x = {:?},  F = {}", state.x(), state.objective());

    // The full solver from the same start.
    let config = SolverConfig::new(Algorithm::Rcd)
        .with_seed(1)
        .with_epsilon(1e-12)
        .with_max_full_iterations(200);
    let out = rcd_solve(&problem, &x0, &config).unwrap();
    println!(
        "solver:     x = ({:.6}, {:.6}), F = {:.6} after {} raw iterations [{:?}]",
        out.x[0],
        out.x[1],
        out.objective(),
        out.raw_iterations,
        out.stop
    );
    for row in out.trace.rows.iter().take(5) {
        println!(
            "  k = {:>4.1}  F = {:.9}  defect = {:.1e}",
            row.full_iteration, row.objective, row.feasibility_defect
        );
    }
}
