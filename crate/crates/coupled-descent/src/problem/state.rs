//! Solver iterate with maintained residual `r = Z x`.
//!
//! Every update flows through [`SolverState::apply_deltas`], which keeps the
//! residual, the constraint values and the cached objective incrementally
//! consistent. The residual is recomputed from scratch every `10 N` block
//! updates to bound floating-point drift.

use crate::error::{Error, Result};

use super::composite::CompositeProblem;
use super::coupling::Coupling;

/// A direction supported on a few blocks.
#[derive(Clone, Debug, Default)]
pub struct BlockDirection {
    entries: Vec<(usize, Vec<f64>)>,
}

impl BlockDirection {
    pub fn new() -> Self {
        BlockDirection { entries: Vec::new() }
    }

    pub fn push_block(&mut self, block: usize, values: Vec<f64>) {
        self.entries.push((block, values));
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.entries.iter().map(|(b, v)| (*b, v.as_slice()))
    }

    pub fn num_blocks(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.iter().all(|&d| d == 0.0))
    }

    /// Squared Euclidean norm of the direction.
    pub fn norm_sq(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|(_, v)| v.iter())
            .map(|d| d * d)
            .sum()
    }
}

/// Current iterate plus the cached quantities solvers need at `O(1)` cost.
#[derive(Clone, Debug)]
pub struct SolverState {
    x: Vec<f64>,
    residual: Vec<f64>,
    constraint_value: Vec<f64>,
    objective: f64,
    updates_since_refresh: usize,
    refresh_period: usize,
    coordinate_touches: u64,
    block_updates: u64,
}

impl SolverState {
    pub fn new(problem: &CompositeProblem, x0: &[f64]) -> Result<Self> {
        if x0.len() != problem.dim() {
            return Err(Error::DimensionMismatch {
                what: "initial point",
                expected: problem.dim(),
                got: x0.len(),
            });
        }
        let residual = problem.z().mul_vec(x0)?;
        let constraint_value = problem.coupling().eval(x0);
        let mut state = SolverState {
            x: x0.to_vec(),
            residual,
            constraint_value,
            objective: 0.0,
            updates_since_refresh: 0,
            refresh_period: 10 * problem.num_blocks().max(1),
            coordinate_touches: 0,
            block_updates: 0,
        };
        state.objective = state.objective_from_scratch(problem);
        Ok(state)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// Cached `F(x)`.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// `max_r |(A x - b)_r|`, from the maintained constraint values.
    pub fn feasibility_defect(&self, problem: &CompositeProblem) -> f64 {
        let rhs = problem.coupling().rhs();
        self.constraint_value
            .iter()
            .zip(&rhs)
            .map(|(v, b)| (v - b).abs())
            .fold(0.0, f64::max)
    }

    /// Maintained constraint values `A x` (length 1 for single coupling).
    pub fn constraint_values(&self) -> &[f64] {
        &self.constraint_value
    }

    /// Total nonzeros touched while computing coordinate derivatives.
    pub fn coordinate_touches(&self) -> u64 {
        self.coordinate_touches
    }

    pub fn block_updates(&self) -> u64 {
        self.block_updates
    }

    /// Derivative of `f` along coordinate `c`: `<z_c, r> + q_c`.
    #[inline]
    pub fn grad_coord(&mut self, problem: &CompositeProblem, c: usize) -> f64 {
        #[cfg(debug_assertions)]
        self.debug_check_residual(problem);
        self.coordinate_touches += problem.z().col_nnz(c) as u64;
        problem.z().col_dot(c, &self.residual) + problem.q()[c]
    }

    /// Block gradient `grad_i f(x)` over block `i`'s columns only.
    pub fn grad_block(&mut self, problem: &CompositeProblem, i: usize) -> Vec<f64> {
        let range = problem.partition().block_range(i);
        range.map(|c| self.grad_coord(problem, c)).collect()
    }

    /// Full gradient `Z^T r + q` into `out`.
    pub fn full_gradient(&mut self, problem: &CompositeProblem, out: &mut Vec<f64>) {
        #[cfg(debug_assertions)]
        self.debug_check_residual(problem);
        let n = problem.dim();
        out.clear();
        out.reserve(n);
        for c in 0..n {
            out.push(problem.z().col_dot(c, &self.residual) + problem.q()[c]);
        }
        self.coordinate_touches += problem.z().nnz() as u64;
    }

    /// Applies per-coordinate deltas, updating `x`, the residual, the
    /// constraint values and the cached objective incrementally. Coordinates
    /// with a box term are clamped back onto the box to remove the one-ulp
    /// overshoot of `x + (y - x)`.
    pub fn apply_deltas(&mut self, problem: &CompositeProblem, deltas: &[(usize, f64)]) {
        let mut quad_delta = 0.0;
        let mut lin_delta = 0.0;
        let mut h_delta = 0.0;
        for &(c, d) in deltas {
            if d == 0.0 {
                continue;
            }
            let kind = problem.nonsmooth().kind(c);
            let old = self.x[c];
            let new = kind.clamp(old + d);
            let step = new - old;
            if step == 0.0 {
                continue;
            }
            h_delta += kind.eval(new) - kind.eval(old);
            lin_delta += problem.q()[c] * step;
            let (rows, vals) = problem.z().col(c);
            for (&row, &v) in rows.iter().zip(vals) {
                let r_old = self.residual[row as usize];
                let r_new = r_old + v * step;
                quad_delta += 0.5 * (r_new * r_new - r_old * r_old);
                self.residual[row as usize] = r_new;
            }
            match problem.coupling() {
                Coupling::Single { a, .. } => {
                    self.constraint_value[0] += a[c] * step;
                }
                Coupling::General { a_mat, .. } => {
                    for r in 0..a_mat.nrows() {
                        self.constraint_value[r] += a_mat.get(r, c) * step;
                    }
                }
            }
            self.x[c] = new;
        }
        self.objective += quad_delta + lin_delta + h_delta;
    }

    /// Applies a block-sparse direction. Blocks not named in `direction` are
    /// untouched; the residual cost is `O(nnz of the touched columns)`.
    pub fn apply_update(&mut self, problem: &CompositeProblem, direction: &BlockDirection) {
        let mut deltas: Vec<(usize, f64)> = Vec::new();
        for (block, values) in direction.blocks() {
            let range = problem.partition().block_range(block);
            debug_assert_eq!(range.len(), values.len());
            for (c, &d) in range.zip(values) {
                deltas.push((c, d));
            }
        }
        self.apply_deltas(problem, &deltas);
        self.note_block_updates(problem, direction.num_blocks());
    }

    /// Fast path for a scalar coordinate pair.
    #[inline]
    pub fn apply_scalar_pair(
        &mut self,
        problem: &CompositeProblem,
        ci: usize,
        cj: usize,
        di: f64,
        dj: f64,
    ) {
        self.apply_deltas(problem, &[(ci, di), (cj, dj)]);
        self.note_block_updates(problem, 2);
    }

    /// Applies a dense step `d` (used by full-gradient methods).
    pub fn apply_dense(&mut self, problem: &CompositeProblem, d: &[f64]) {
        debug_assert_eq!(d.len(), problem.dim());
        let deltas: Vec<(usize, f64)> = d
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(c, &v)| (c, v))
            .collect();
        self.apply_deltas(problem, &deltas);
        self.note_block_updates(problem, problem.num_blocks());
    }

    fn note_block_updates(&mut self, problem: &CompositeProblem, count: usize) {
        self.block_updates += count as u64;
        self.updates_since_refresh += count;
        if self.updates_since_refresh >= self.refresh_period {
            self.refresh(problem);
        }
    }

    /// Recomputes the residual, constraint values and objective from `x`.
    pub fn refresh(&mut self, problem: &CompositeProblem) {
        let fresh = problem.z().mul_vec(&self.x).expect("state dimension");
        #[cfg(debug_assertions)]
        {
            let scale = 1.0 + fresh.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            let drift = self
                .residual
                .iter()
                .zip(&fresh)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            debug_assert!(
                drift <= 1e-8 * scale,
                "residual drift {drift:.3e} exceeds tolerance"
            );
        }
        self.residual = fresh;
        self.constraint_value = problem.coupling().eval(&self.x);
        self.objective = self.objective_from_scratch(problem);
        self.updates_since_refresh = 0;
    }

    fn objective_from_scratch(&self, problem: &CompositeProblem) -> f64 {
        let h = problem.nonsmooth().eval(&self.x);
        if h == f64::INFINITY {
            return f64::INFINITY;
        }
        let quad: f64 = self.residual.iter().map(|v| v * v).sum();
        let lin: f64 = problem.q().iter().zip(&self.x).map(|(q, x)| q * x).sum();
        0.5 * quad + lin + h
    }

    /// Checks the cached residual and objective against a recomputation.
    pub fn validate(&self, problem: &CompositeProblem) -> Result<()> {
        let fresh = problem.z().mul_vec(&self.x)?;
        let scale = 1.0 + fresh.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        let drift = self
            .residual
            .iter()
            .zip(&fresh)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        if drift > 1e-10 * scale {
            return Err(Error::Invariant(format!(
                "residual stale: drift {drift:.3e}, tolerance {:.3e}",
                1e-10 * scale
            )));
        }
        let objective = self.objective_from_scratch(problem);
        let obj_scale = 1.0 + objective.abs();
        if objective.is_finite() && (objective - self.objective).abs() > 1e-10 * obj_scale {
            return Err(Error::Invariant(format!(
                "objective cache stale: cached {}, fresh {}",
                self.objective, objective
            )));
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn debug_check_residual(&self, problem: &CompositeProblem) {
        if let Ok(fresh) = problem.z().mul_vec(&self.x) {
            let scale = 1.0 + fresh.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            let drift = self
                .residual
                .iter()
                .zip(&fresh)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            assert!(
                drift <= 1e-8 * scale,
                "stale residual detected in gradient computation: drift {drift:.3e}"
            );
        }
    }
}

#[cfg(test)]
#[allow(clippy::useless_vec, clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::problem::{
        eval_objective, BlockPartition, Coupling, SeparableTerm, StructuredSmooth,
    };
    use crate::rng::Xoshiro256PlusPlus;
    use crate::sparse::CscMatrix;

    fn random_problem(seed: u64, n: usize, m: usize) -> CompositeProblem {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut triplets = Vec::new();
        for c in 0..n {
            for r in 0..m {
                if rng.next_f64() < 0.6 {
                    triplets.push((r, c, rng.uniform(-1.0, 1.0)));
                }
            }
        }
        let z = CscMatrix::from_triplets(m, n, &triplets).unwrap();
        let q: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.uniform(0.5, 1.5)).collect();
        CompositeProblem::new(
            StructuredSmooth::new(z, q).unwrap(),
            SeparableTerm::l1(0.3).unwrap(),
            Coupling::single(a, 0.0),
            BlockPartition::scalar(n).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn gradient_at_zero_is_q() {
        let problem = random_problem(1, 6, 4);
        let mut state = SolverState::new(&problem, &vec![0.0; 6]).unwrap();
        for i in 0..6 {
            let g = state.grad_block(&problem, i);
            assert_eq!(g.len(), 1);
            assert!((g[0] - problem.q()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_gradient_hand_case() {
        let z = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let problem = CompositeProblem::new(
            StructuredSmooth::new(z, vec![0.0, 0.0]).unwrap(),
            SeparableTerm::zero(),
            Coupling::single(vec![1.0, 1.0], 1.0),
            BlockPartition::scalar(2).unwrap(),
            0.0,
        )
        .unwrap();
        let mut state = SolverState::new(&problem, &[3.0, -2.0]).unwrap();
        assert!((state.grad_block(&problem, 0)[0] - 3.0).abs() < 1e-15);
        assert!((state.grad_block(&problem, 1)[0] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_dense_oracle() {
        let problem = random_problem(7, 8, 5);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
        let x: Vec<f64> = (0..8).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let mut state = SolverState::new(&problem, &x).unwrap();
        // Dense Z^T Z x + q.
        let dense = problem.z().to_dense();
        let m = dense.len();
        let zx: Vec<f64> = (0..m)
            .map(|r| dense[r].iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        for c in 0..8 {
            let mut expect = problem.q()[c];
            for r in 0..m {
                expect += dense[r][c] * zx[r];
            }
            let got = state.grad_coord(&problem, c);
            assert!((got - expect).abs() < 1e-12, "coord {c}: {got} vs {expect}");
        }
    }

    #[test]
    fn zero_direction_keeps_state() {
        let problem = random_problem(3, 5, 4);
        let x: Vec<f64> = vec![0.1; 5];
        let mut state = SolverState::new(&problem, &x).unwrap();
        let before_obj = state.objective();
        let before_x = state.x().to_vec();
        state.apply_deltas(&problem, &[(0, 0.0), (3, 0.0)]);
        assert_eq!(state.objective(), before_obj);
        assert_eq!(state.x(), &before_x[..]);
    }

    #[test]
    fn incremental_update_matches_recompute() {
        let problem = random_problem(11, 10, 6);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let x: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut state = SolverState::new(&problem, &x).unwrap();
        for _ in 0..200 {
            let i = rng.next_below(10);
            let j = (i + 1 + rng.next_below(9)) % 10;
            let di = rng.uniform(-0.5, 0.5);
            let dj = rng.uniform(-0.5, 0.5);
            state.apply_scalar_pair(&problem, i, j, di, dj);
        }
        let fresh = problem.z().mul_vec(state.x()).unwrap();
        let err = state
            .residual()
            .iter()
            .zip(&fresh)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        let scale = 1.0 + fresh.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        assert!(err <= 1e-12 * scale, "residual drift {err:.3e}");
        let obj = eval_objective(&problem, state.x()).unwrap();
        assert!(
            (obj - state.objective()).abs() <= 1e-10 * (1.0 + obj.abs()),
            "objective drift: {} vs {}",
            state.objective(),
            obj
        );
        state.validate(&problem).unwrap();
    }

    #[test]
    fn objective_delta_matches_full_evaluation() {
        let problem = random_problem(13, 7, 4);
        let x: Vec<f64> = vec![0.2; 7];
        let mut state = SolverState::new(&problem, &x).unwrap();
        let before = eval_objective(&problem, state.x()).unwrap();
        let mut dir = BlockDirection::new();
        dir.push_block(2, vec![0.7]);
        dir.push_block(5, vec![-0.4]);
        state.apply_update(&problem, &dir);
        let after = eval_objective(&problem, state.x()).unwrap();
        let delta_cached = state.objective() - before;
        let delta_true = after - before;
        assert!(
            (delta_cached - delta_true).abs() <= 1e-10 * (1.0 + delta_true.abs()),
            "{delta_cached} vs {delta_true}"
        );
    }

    #[test]
    fn validate_detects_stale_residual() {
        let problem = random_problem(17, 5, 3);
        let mut state = SolverState::new(&problem, &vec![0.0; 5]).unwrap();
        state.residual[0] += 1.0;
        assert!(state.validate(&problem).is_err());
    }

    // Active only when debug assertions are compiled in (dev profile).
    #[cfg(debug_assertions)]
    #[test]
    #[should_panic(expected = "stale residual")]
    fn debug_builds_catch_stale_residual_in_gradients() {
        let problem = random_problem(19, 5, 3);
        let mut state = SolverState::new(&problem, &vec![0.0; 5]).unwrap();
        state.residual[0] += 1.0;
        let _ = state.grad_coord(&problem, 0);
    }
}
