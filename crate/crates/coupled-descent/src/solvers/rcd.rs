//! Randomized two-block coordinate descent.
//!
//! Each raw iteration samples an unordered block pair uniformly
//! (probability `2 / (N (N-1))` per pair), solves the pairwise model
//! exactly and applies the update. A full iteration is `N / 2` raw
//! iterations.

use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Coupling, SolverState};
use crate::rng::Xoshiro256PlusPlus;
use crate::subsolvers::{scalar_pair_core, two_block_direction};

use super::{validate_alpha, validate_start, Recorder, SolveOutcome, SolverConfig, StopReason};

/// Uniform unordered pair via two draws; equivalent to sampling two
/// distinct indices without replacement.
#[inline]
pub(crate) fn sample_pair(rng: &mut Xoshiro256PlusPlus, n: usize) -> (usize, usize) {
    let i = rng.next_below(n);
    let mut j = rng.next_below(n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

pub fn rcd_solve(
    problem: &CompositeProblem,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    config.validate()?;
    validate_alpha(problem, config)?;
    validate_start(problem, x0)?;
    let n_blocks = problem.num_blocks();
    if n_blocks < 2 {
        return Err(Error::UnsupportedConfiguration(
            "randomized pair descent needs at least two blocks".into(),
        ));
    }
    if matches!(problem.coupling(), Coupling::General { .. }) {
        return Err(Error::UnsupportedConfiguration(
            "rcd handles a single coupling constraint; use rcd_n for general coupling".into(),
        ));
    }

    let mut state = SolverState::new(problem, x0)?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(config.seed);
    let raw_per_full = problem.num_blocks() as f64 / 2.0;
    let mut recorder = Recorder::start(
        config,
        raw_per_full,
        state.objective(),
        state.feasibility_defect(problem),
    );

    let scalar = problem.partition().is_scalar();
    let a = match problem.coupling() {
        Coupling::Single { a, .. } => a.as_slice(),
        Coupling::General { .. } => unreachable!(),
    };

    let mut raw = 0u64;
    let stop = loop {
        if raw >= recorder.max_raw() {
            break StopReason::MaxFullIterations;
        }
        let (i, j) = sample_pair(&mut rng, n_blocks);
        if scalar {
            let g_i = state.grad_coord(problem, i);
            let g_j = state.grad_coord(problem, j);
            let (di, dj) = scalar_pair_core(
                problem.pair_constant(i, j),
                problem.lip_pow_alpha(i),
                problem.lip_pow_alpha(j),
                g_i,
                g_j,
                state.x()[i],
                state.x()[j],
                a[i],
                a[j],
                problem.nonsmooth().kind(i),
                problem.nonsmooth().kind(j),
            )?;
            state.apply_scalar_pair(problem, i, j, di, dj);
        } else {
            let direction = two_block_direction(problem, &mut state, i, j)?;
            state.apply_update(problem, &direction);
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
    use crate::problem::{BlockPartition, SeparableTerm, StructuredSmooth};
    use crate::solvers::{Algorithm, StopRule};
    use crate::sparse::CscMatrix;

    fn two_var_problem() -> CompositeProblem {
        // min 1/2 (x1^2 + x2^2) s.t. x1 + x2 = 1: optimum (0.5, 0.5).
        let z = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        CompositeProblem::new(
            StructuredSmooth::new(z, vec![0.0, 0.0]).unwrap(),
            SeparableTerm::zero(),
            Coupling::single(vec![1.0, 1.0], 1.0),
            BlockPartition::scalar(2).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn two_variable_hand_optimum() {
        let problem = two_var_problem();
        let config = SolverConfig::new(Algorithm::Rcd)
            .with_seed(7)
            .with_max_full_iterations(100);
        let out = rcd_solve(&problem, &[1.0, 0.0], &config).unwrap();
        assert!((out.x[0] - 0.5).abs() < 1e-6, "{:?}", out.x);
        assert!((out.x[1] - 0.5).abs() < 1e-6);
        assert!(out.raw_iterations < 100);
    }

    #[test]
    fn optimal_start_stays_put() {
        let problem = two_var_problem();
        let config = SolverConfig::new(Algorithm::Rcd)
            .with_seed(3)
            .with_max_full_iterations(50);
        let out = rcd_solve(&problem, &[0.5, 0.5], &config).unwrap();
        for row in &out.trace.rows {
            assert!((row.objective - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn infeasible_start_rejected() {
        let problem = two_var_problem();
        let config = SolverConfig::new(Algorithm::Rcd);
        assert!(matches!(
            rcd_solve(&problem, &[0.0, 0.0], &config),
            Err(Error::InfeasibleStart { .. })
        ));
    }

    #[test]
    fn traces_are_seed_deterministic() {
        let problem = two_var_problem();
        let config = SolverConfig::new(Algorithm::Rcd)
            .with_seed(11)
            .with_max_full_iterations(40)
            .with_stop_rule(StopRule::PlateauWindow { window: 10 });
        let a = rcd_solve(&problem, &[1.0, 0.0], &config).unwrap();
        let b = rcd_solve(&problem, &[1.0, 0.0], &config).unwrap();
        assert_eq!(a.trace.rows.len(), b.trace.rows.len());
        for (ra, rb) in a.trace.rows.iter().zip(&b.trace.rows) {
            assert_eq!(ra.raw_iterations, rb.raw_iterations);
            assert_eq!(ra.objective.to_bits(), rb.objective.to_bits());
            assert_eq!(
                ra.feasibility_defect.to_bits(),
                rb.feasibility_defect.to_bits()
            );
        }
        assert_eq!(a.x, b.x);
    }

    #[test]
    fn gap_rule_stops_early() {
        let problem = two_var_problem();
        let config = SolverConfig::new(Algorithm::Rcd)
            .with_seed(5)
            .with_max_full_iterations(10_000)
            .with_stop_rule(StopRule::GapToReference {
                f_star: 0.25,
                gap: 1e-3,
            });
        let out = rcd_solve(&problem, &[1.0, 0.0], &config).unwrap();
        assert_eq!(out.stop, StopReason::GapReached);
        assert!(out.objective() - 0.25 <= 1e-3);
    }
}
