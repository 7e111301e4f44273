//! Full composite gradient method.
//!
//! Each iteration takes the proximal full-gradient step
//! `x+ = argmin_y <grad f(x), y - x> + (L_f / 2) ||y - x||^2 + h(y)`
//! subject to `a^T y = b`. On the nonnegativity/simplex configuration this
//! is a simplex projection of `x - grad/L_f`, otherwise a quadratic
//! knapsack (with l1 splitting). `L_f` comes from power iteration on
//! `Z^T Z` (30 iterations, 1% margin) and is doubled on the rare step the
//! estimate proves too small.

use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Coupling, SolverState};
use crate::subsolvers::{simplex_projection, solve_coupled_prox};

use super::{validate_alpha, validate_start, Recorder, SolveOutcome, SolverConfig, StopReason};

const POWER_ITERATIONS: usize = 30;
const MAX_DOUBLINGS: usize = 60;

pub fn gm_solve(
    problem: &CompositeProblem,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    config.validate()?;
    validate_alpha(problem, config)?;
    validate_start(problem, x0)?;
    let (a, b) = match problem.coupling() {
        Coupling::Single { a, b } => (a.as_slice(), *b),
        Coupling::General { .. } => {
            return Err(Error::UnsupportedConfiguration(
                "gm handles a single coupling constraint".into(),
            ))
        }
    };
    let n = problem.dim();
    let simplex_case =
        problem.nonsmooth().is_nonnegativity(n) && b == 1.0 && a.iter().all(|&v| v == 1.0);

    let mut l_f = problem.estimate_full_lipschitz(POWER_ITERATIONS);
    let mut state = SolverState::new(problem, x0)?;
    let mut recorder = Recorder::start(
        config,
        1.0,
        state.objective(),
        state.feasibility_defect(problem),
    );

    let mut g: Vec<f64> = Vec::with_capacity(n);
    let mut raw = 0u64;
    let stop = loop {
        if raw >= recorder.max_raw() {
            break StopReason::MaxFullIterations;
        }
        state.full_gradient(problem, &mut g);

        let mut accepted: Option<Vec<f64>> = None;
        for _ in 0..=MAX_DOUBLINGS {
            let y = if simplex_case {
                let shifted: Vec<f64> =
                    state.x().iter().zip(&g).map(|(xi, gi)| xi - gi / l_f).collect();
                simplex_projection(&shifted)
            } else {
                let quad = vec![l_f; n];
                let mut kind = |c: usize| problem.nonsmooth().kind(c);
                solve_coupled_prox(&g, &quad, state.x(), a, state.constraint_values()[0], &mut kind)?
            };
            // Exact decrease of the candidate step.
            let d: Vec<f64> = y.iter().zip(state.x()).map(|(yi, xi)| yi - xi).collect();
            let u = problem.z().mul_vec(&d)?;
            let lin: f64 = g.iter().zip(&d).map(|(gi, di)| gi * di).sum();
            let quad_term: f64 = 0.5 * u.iter().map(|v| v * v).sum::<f64>();
            let h_delta: f64 = d
                .iter()
                .enumerate()
                .map(|(c, &dc)| {
                    let kind = problem.nonsmooth().kind(c);
                    kind.eval(kind.clamp(state.x()[c] + dc)) - kind.eval(state.x()[c])
                })
                .sum();
            let delta = lin + quad_term + h_delta;
            let scale = 1.0 + state.objective().abs();
            if delta <= 1e-12 * scale {
                accepted = Some(d);
                break;
            }
            // The curvature estimate was too small for this step.
            l_f *= 2.0;
        }
        let Some(d) = accepted else {
            return Err(Error::Invariant(
                "gm step kept increasing the objective after doubling the curvature".into(),
            ));
        };
        let x_scale = 1.0 + state.x().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let d_max = d.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if d_max <= 1e-13 * x_scale {
            break StopReason::Stationary;
        }
        state.apply_dense(problem, &d);

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
