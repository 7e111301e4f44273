//! Randomized (m+1)-block descent for general coupling `A x = b`.
//!
//! Each raw iteration samples an (m+1)-tuple of distinct scalar blocks
//! uniformly without replacement and minimizes the Euclidean model along
//! the one-dimensional null space of the restricted constraint matrix.
//! Rank-deficient restrictions are resampled. A full iteration is
//! `N / (m+1)` raw iterations.

use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Coupling, SolverState};
use crate::rng::{sample_distinct, Xoshiro256PlusPlus};
use crate::subsolvers::{tuple_direction, TupleOutcome};

use super::{validate_alpha, validate_start, Recorder, SolveOutcome, SolverConfig, StopReason};

/// Consecutive rank-deficient tuples tolerated before giving up.
const MAX_CONSECUTIVE_RESAMPLES: usize = 10_000;

pub fn rcd_n_solve(
    problem: &CompositeProblem,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    config.validate()?;
    validate_alpha(problem, config)?;
    validate_start(problem, x0)?;
    let m = match problem.coupling() {
        Coupling::General { a_mat, .. } => a_mat.nrows(),
        Coupling::Single { .. } => {
            return Err(Error::UnsupportedConfiguration(
                "rcd_n needs general coupling; lift a single constraint with Coupling::to_general"
                    .into(),
            ))
        }
    };
    if !problem.partition().is_scalar() {
        return Err(Error::UnsupportedConfiguration(
            "rcd_n supports scalar blocks only".into(),
        ));
    }
    let n_blocks = problem.num_blocks();
    if n_blocks < m + 1 {
        return Err(Error::UnsupportedConfiguration(format!(
            "rcd_n needs at least m + 1 = {} blocks, found {}",
            m + 1,
            n_blocks
        )));
    }

    let mut state = SolverState::new(problem, x0)?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(config.seed);
    let raw_per_full = n_blocks as f64 / (m + 1) as f64;
    let mut recorder = Recorder::start(
        config,
        raw_per_full,
        state.objective(),
        state.feasibility_defect(problem),
    );

    let mut raw = 0u64;
    let mut consecutive_resamples = 0usize;
    let stop = loop {
        if raw >= recorder.max_raw() {
            break StopReason::MaxFullIterations;
        }
        let tuple = sample_distinct(&mut rng, n_blocks, m + 1);
        match tuple_direction(problem, &mut state, &tuple)? {
            TupleOutcome::Resample => {
                consecutive_resamples += 1;
                if consecutive_resamples > MAX_CONSECUTIVE_RESAMPLES {
                    return Err(Error::Invariant(
                        "coupling matrix is rank deficient on almost all tuples".into(),
                    ));
                }
                continue;
            }
            TupleOutcome::Direction(direction) => {
                consecutive_resamples = 0;
                state.apply_update(problem, &direction);
            }
        }
        raw += 1;
        if let Some(reason) = recorder.observe(
            raw,
            state.objective(),
            state.feasibility_defect(problem),
        ) {
            break reason;
        }
    };

    state.refresh(problem);
    let defect = state.feasibility_defect(problem);
    let objective = state.objective();
    let touches = state.coordinate_touches();
    let trace = recorder.finish(raw, objective, defect, config.seed, touches);
    Ok(SolveOutcome {
        x: state.x().to_vec(),
        trace,
        stop,
        raw_iterations: raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{BlockPartition, DenseMatrix, SeparableTerm, StructuredSmooth};
    use crate::solvers::rcd_solve;
    use crate::solvers::Algorithm;
    use crate::sparse::CscMatrix;

    fn quad_problem(coupling: Coupling) -> CompositeProblem {
        let z = CscMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 1.4), (2, 2, 0.8)]).unwrap();
        CompositeProblem::new(
            StructuredSmooth::new(z, vec![0.5, -0.3, 0.1]).unwrap(),
            SeparableTerm::boxed(-2.0, 2.0).unwrap(),
            coupling,
            BlockPartition::scalar(3).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn m1_matches_rcd_trajectory() {
        let a = vec![1.0, -0.7, 0.4];
        let single = quad_problem(Coupling::single(a.clone(), 0.0));
        let general = quad_problem(
            Coupling::general(DenseMatrix::from_rows(vec![a]).unwrap(), vec![0.0]).unwrap(),
        );
        let config = SolverConfig::new(Algorithm::Rcd)
            .with_seed(42)
            .with_max_full_iterations(200);
        let config_n = SolverConfig::new(Algorithm::RcdN)
            .with_seed(42)
            .with_max_full_iterations(200);
        let x0 = [0.0, 0.0, 0.0];
        let out_rcd = rcd_solve(&single, &x0, &config).unwrap();
        let out_n = rcd_n_solve(&general, &x0, &config_n).unwrap();
        assert_eq!(out_rcd.trace.rows.len(), out_n.trace.rows.len());
        for (ra, rb) in out_rcd.trace.rows.iter().zip(&out_n.trace.rows) {
            assert_eq!(ra.raw_iterations, rb.raw_iterations);
            assert!(
                (ra.objective - rb.objective).abs() <= 1e-8 * (1.0 + ra.objective.abs()),
                "row {}: {} vs {}",
                ra.raw_iterations,
                ra.objective,
                rb.objective
            );
        }
    }

    #[test]
    fn optimal_start_constant_trace() {
        // min 1/2 x^T x s.t. x1 - x2 = 0, x2 - x3 = 0 from the optimum 0.
        let z = CscMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        let a_mat =
            DenseMatrix::from_rows(vec![vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let problem = CompositeProblem::new(
            StructuredSmooth::new(z, vec![0.0; 3]).unwrap(),
            SeparableTerm::zero(),
            Coupling::general(a_mat, vec![0.0, 0.0]).unwrap(),
            BlockPartition::scalar(3).unwrap(),
            0.0,
        )
        .unwrap();
        let config = SolverConfig::new(Algorithm::RcdN)
            .with_seed(1)
            .with_max_full_iterations(30);
        let out = rcd_n_solve(&problem, &[0.0; 3], &config).unwrap();
        for row in &out.trace.rows {
            assert!(row.objective.abs() < 1e-14);
        }
    }

    #[test]
    fn single_coupling_is_rejected() {
        let problem = quad_problem(Coupling::single(vec![1.0, 1.0, 1.0], 0.0));
        let config = SolverConfig::new(Algorithm::RcdN);
        assert!(matches!(
            rcd_n_solve(&problem, &[0.0; 3], &config),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }
}
