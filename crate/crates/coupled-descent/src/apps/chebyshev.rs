//! Chebyshev center (smallest enclosing ball) via its simplex-constrained
//! dual.
//!
//! For points `z_1..z_n` the dual is
//! `min ||Z x||^2 - sum_i ||z_i||^2 x_i  s.t. e' x = 1, x >= 0`.
//! The canonical smooth form `1/2 ||W x||^2 + q' x` uses `W = sqrt(2) Z`
//! and `q_i = -||z_i||^2`. A primal ball is recovered from any dual point
//! by `center = Z x`, `radius^2 = -||Z x||^2 + sum_i ||z_i||^2 x_i`.

use crate::error::{Error, Result};
use crate::problem::{
    BlockPartition, CompositeProblem, Coupling, SeparableTerm, StructuredSmooth,
};
use crate::rng::Xoshiro256PlusPlus;
use crate::sparse::CscMatrix;

/// The point set, columns in `R^m_dim`.
#[derive(Clone, Debug)]
pub struct ChebyshevInstance {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl ChebyshevInstance {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidProblem("need at least one point".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidProblem(
                "points must share a positive dimension".into(),
            ));
        }
        Ok(ChebyshevInstance { points, dim })
    }

    /// `n` points uniform in `[0, 1]^m_dim`.
    pub fn random(n: usize, m_dim: usize, seed: u64) -> Result<Self> {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| (0..m_dim).map(|_| rng.next_f64()).collect())
            .collect();
        Self::new(points)
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    fn point_norm_sq(&self, i: usize) -> f64 {
        self.points[i].iter().map(|v| v * v).sum()
    }
}

/// Recovered enclosing ball.
#[derive(Clone, Debug)]
pub struct BallSolution {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallSolution {
    /// Largest distance from the center to any instance point.
    pub fn max_distance(&self, instance: &ChebyshevInstance) -> f64 {
        instance
            .points()
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&self.center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the dual problem plus the two initial points used in practice:
/// `e_1` and `e / n` (both feasible).
pub fn build_chebyshev(
    instance: &ChebyshevInstance,
    alpha: f64,
) -> Result<(CompositeProblem, Vec<f64>, Vec<f64>)> {
    let n = instance.num_points();
    let m = instance.dim();
    let sqrt2 = std::f64::consts::SQRT_2;
    let columns: Vec<Vec<f64>> = instance
        .points()
        .iter()
        .map(|p| p.iter().map(|v| sqrt2 * v).collect())
        .collect();
    let w = CscMatrix::from_dense_columns(m, &columns)?;
    let q: Vec<f64> = (0..n).map(|i| -instance.point_norm_sq(i)).collect();
    let problem = CompositeProblem::new(
        StructuredSmooth::new(w, q)?,
        SeparableTerm::boxed(0.0, f64::INFINITY)?,
        Coupling::single(vec![1.0; n], 1.0),
        BlockPartition::scalar(n)?,
        alpha,
    )?;
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let uniform = vec![1.0 / n as f64; n];
    Ok((problem, e1, uniform))
}

/// Recovers `(center, radius)` from a dual point on the simplex. A slightly
/// negative squared radius (dual rounding) is clamped to zero; anything
/// materially negative signals a non-converged dual input.
pub fn recover_ball(instance: &ChebyshevInstance, x: &[f64]) -> Result<BallSolution> {
    let n = instance.num_points();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            what: "dual point",
            expected: n,
            got: x.len(),
        });
    }
    let mut center = vec![0.0; instance.dim()];
    for (i, point) in instance.points().iter().enumerate() {
        if x[i] != 0.0 {
            for (c, v) in center.iter_mut().zip(point) {
                *c += v * x[i];
            }
        }
    }
    let center_norm_sq: f64 = center.iter().map(|v| v * v).sum();
    let weighted: f64 = (0..n).map(|i| instance.point_norm_sq(i) * x[i]).sum();
    let radicand = weighted - center_norm_sq;
    let scale = 1.0 + weighted.abs() + center_norm_sq;
    if radicand < -1e-10 * scale {
        return Err(Error::NonConvergedDual { radicand });
    }
    Ok(BallSolution {
        center,
        radius: radicand.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::eval_objective;

    #[test]
    fn single_point_gives_zero_radius() {
        let instance = ChebyshevInstance::new(vec![vec![2.0, -1.0]]).unwrap();
        let ball = recover_ball(&instance, &[1.0]).unwrap();
        assert_eq!(ball.center, vec![2.0, -1.0]);
        assert_eq!(ball.radius, 0.0);
    }

    #[test]
    fn two_point_hand_case() {
        let instance = ChebyshevInstance::new(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let ball = recover_ball(&instance, &[0.5, 0.5]).unwrap();
        assert!((ball.center[0] - 1.0).abs() < 1e-15);
        assert!(ball.center[1].abs() < 1e-15);
        assert!((ball.radius - 1.0).abs() < 1e-15);
    }

    #[test]
    fn builder_initial_points_are_feasible() {
        let instance = ChebyshevInstance::random(20, 3, 5).unwrap();
        let (problem, e1, uniform) = build_chebyshev(&instance, 0.0).unwrap();
        for x0 in [&e1, &uniform] {
            assert!(problem.coupling().defect(x0) <= 1e-12);
            assert!(eval_objective(&problem, x0).unwrap().is_finite());
        }
        // Dual objective at e_1 equals -||z_1||^2 + ||z_1||^2 = 0... namely
        // F(e1) = ||Z e1||^2 - ||z_1||^2 = 0.
        let f = eval_objective(&problem, &e1).unwrap();
        assert!(f.abs() < 1e-12, "{f}");
    }

    #[test]
    fn far_from_optimal_dual_is_rejected() {
        // x concentrated on one point but evaluated against a far center:
        // craft an infeasible radicand by using a non-simplex x.
        let instance =
            ChebyshevInstance::new(vec![vec![0.0, 0.0], vec![10.0, 0.0]]).unwrap();
        let res = recover_ball(&instance, &[2.0, -1.0]);
        assert!(matches!(res, Err(Error::NonConvergedDual { .. })));
    }
}
