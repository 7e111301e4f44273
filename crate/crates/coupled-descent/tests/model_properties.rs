//! Numerical properties of the problem model: descent inequalities,
//! pairwise Lipschitz bounds, norm duality and residual maintenance.

mod common;

use coupled_descent::problem::{
    alpha_dual_norm, alpha_norm, eval_objective, BlockPartition, CompositeProblem, Coupling,
    SeparableTerm, SolverState, StructuredSmooth,
};
use coupled_descent::rng::Xoshiro256PlusPlus;
use coupled_descent::sparse::CscMatrix;

fn random_problem(
    rng: &mut Xoshiro256PlusPlus,
    n: usize,
    m: usize,
    sizes: Vec<usize>,
    alpha: f64,
) -> CompositeProblem {
    let mut triplets = Vec::new();
    for c in 0..n {
        for r in 0..m {
            if rng.next_f64() < 0.5 {
                triplets.push((r, c, rng.uniform(-1.0, 1.0)));
            }
        }
    }
    let z = CscMatrix::from_triplets(m, n, &triplets).unwrap();
    let q: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.uniform(0.3, 1.3)).collect();
    CompositeProblem::new(
        StructuredSmooth::new(z, q).unwrap(),
        SeparableTerm::zero(),
        Coupling::single(a, 0.0),
        BlockPartition::from_sizes(sizes).unwrap(),
        alpha,
    )
    .unwrap()
}

fn smooth_eval(problem: &CompositeProblem, x: &[f64]) -> f64 {
    let r = problem.z().mul_vec(x).unwrap();
    let quad: f64 = r.iter().map(|v| v * v).sum();
    let lin: f64 = problem.q().iter().zip(x).map(|(a, b)| a * b).sum();
    0.5 * quad + lin
}

fn smooth_grad(problem: &CompositeProblem, x: &[f64]) -> Vec<f64> {
    let r = problem.z().mul_vec(x).unwrap();
    (0..problem.dim())
        .map(|c| problem.z().col_dot(c, &r) + problem.q()[c])
        .collect()
}

#[test]
fn block_descent_inequality_holds() {
    // f(x + U_i h) <= f(x) + <grad_i f(x), h> + (L_i / 2) ||h||^2.
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(101);
    for alpha in [0.0, 1.0] {
        let problem = random_problem(&mut rng, 12, 6, vec![2, 1, 3, 1, 2, 3], alpha);
        for _ in 0..5000 {
            let x: Vec<f64> = (0..12).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let i = rng.next_below(problem.num_blocks());
            let range = problem.partition().block_range(i);
            let g = smooth_grad(&problem, &x);
            let mut y = x.clone();
            let mut lin = 0.0;
            let mut norm_sq = 0.0;
            for c in range.clone() {
                let h = rng.uniform(-1.0, 1.0);
                y[c] += h;
                lin += g[c] * h;
                norm_sq += h * h;
            }
            let lhs = smooth_eval(&problem, &y);
            let rhs =
                smooth_eval(&problem, &x) + lin + 0.5 * problem.lipschitz()[i] * norm_sq;
            assert!(
                lhs <= rhs + 1e-9 * (1.0 + rhs.abs()),
                "block {i}: {lhs} > {rhs}"
            );
        }
    }
}

#[test]
fn pairwise_lipschitz_and_two_block_descent() {
    // Pairwise bound with L_ij = L_i^(1-a) + L_j^(1-a):
    // dual-norm gradient variation and the quadratic upper bound.
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(202);
    for alpha in [0.0, 1.0] {
        let problem = random_problem(&mut rng, 10, 5, vec![1; 10], alpha);
        for _ in 0..5000 {
            let x: Vec<f64> = (0..10).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let i = rng.next_below(10);
            let j = (i + 1 + rng.next_below(9)) % 10;
            let si = rng.uniform(-1.0, 1.0);
            let sj = rng.uniform(-1.0, 1.0);
            let mut y = x.clone();
            y[i] += si;
            y[j] += sj;
            let gx = smooth_grad(&problem, &x);
            let gy = smooth_grad(&problem, &y);
            let l_pair = problem.pair_constant(i, j);
            let (wi, wj) = (problem.lip_pow_alpha(i), problem.lip_pow_alpha(j));
            // Restricted alpha-norms of the pair.
            let step_norm = (wi * si * si + wj * sj * sj).sqrt();
            let gcp_i = gy[i] - gx[i];
            let gcp_j = gy[j] - gx[j];
            let grad_dual = (gcp_i * gcp_i / wi + gcp_j * gcp_j / wj).sqrt();
            assert!(
                grad_dual <= l_pair * step_norm + 1e-9 * (1.0 + step_norm),
                "pair gradient bound: {grad_dual} > {l_pair} * {step_norm}"
            );
            // Two-block descent inequality.
            let lhs = smooth_eval(&problem, &y);
            let rhs = smooth_eval(&problem, &x)
                + gx[i] * si
                + gx[j] * sj
                + 0.5 * l_pair * step_norm * step_norm;
            assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
        }
    }
}

#[test]
fn pairwise_descent_holds_for_multi_coordinate_blocks() {
    // Same two-block quadratic upper bound, blocks of mixed sizes.
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(606);
    for alpha in [0.0, 1.0] {
        let sizes = vec![2, 3, 1, 2, 4];
        let problem = random_problem(&mut rng, 12, 7, sizes, alpha);
        for _ in 0..5000 {
            let x: Vec<f64> = (0..12).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let i = rng.next_below(problem.num_blocks());
            let j = (i + 1 + rng.next_below(problem.num_blocks() - 1)) % problem.num_blocks();
            let g = smooth_grad(&problem, &x);
            let mut y = x.clone();
            let mut lin = 0.0;
            let mut step_norm_sq = 0.0;
            for (blk, w) in [
                (i, problem.lip_pow_alpha(i)),
                (j, problem.lip_pow_alpha(j)),
            ] {
                for c in problem.partition().block_range(blk) {
                    let s = rng.uniform(-1.0, 1.0);
                    y[c] += s;
                    lin += g[c] * s;
                    step_norm_sq += w * s * s;
                }
            }
            let lhs = smooth_eval(&problem, &y);
            let rhs = smooth_eval(&problem, &x)
                + lin
                + 0.5 * problem.pair_constant(i, j) * step_norm_sq;
            assert!(
                lhs <= rhs + 1e-9 * (1.0 + rhs.abs()),
                "blocks ({i}, {j}): {lhs} > {rhs}"
            );
        }
    }
}

#[test]
fn extended_norms_satisfy_cauchy_schwarz() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(303);
    for alpha in [0.0, 0.5, 1.0] {
        let problem = random_problem(&mut rng, 9, 5, vec![3, 1, 2, 2, 1], alpha);
        for _ in 0..4000 {
            let x: Vec<f64> = (0..9).map(|_| rng.uniform(-3.0, 3.0)).collect();
            let y: Vec<f64> = (0..9).map(|_| rng.uniform(-3.0, 3.0)).collect();
            let inner: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let bound = alpha_norm(&problem, &x) * alpha_dual_norm(&problem, &y);
            assert!(inner <= bound + 1e-12 * (1.0 + bound));
        }
    }
}

#[test]
fn feasibility_preserved_across_constrained_updates() {
    // Directions satisfying the coupling restriction keep a^T x - b pinned.
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(404);
    let problem = random_problem(&mut rng, 14, 6, vec![1; 14], 0.0);
    let a: Vec<f64> = match problem.coupling() {
        Coupling::Single { a, .. } => a.clone(),
        _ => unreachable!(),
    };
    let x0: Vec<f64> = vec![0.0; 14];
    let mut state = SolverState::new(&problem, &x0).unwrap();
    for _ in 0..5000 {
        let i = rng.next_below(14);
        let j = (i + 1 + rng.next_below(13)) % 14;
        // Move along the pair null direction (a_j, -a_i).
        let t = rng.uniform(-0.3, 0.3);
        state.apply_scalar_pair(&problem, i, j, t * a[j], -t * a[i]);
        let x_norm = state.x().iter().map(|v| v * v).sum::<f64>().sqrt();
        let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = 1.0 + a_norm * x_norm;
        assert!(
            state.feasibility_defect(&problem) <= 1e-9 * scale,
            "defect {} at scale {scale}",
            state.feasibility_defect(&problem)
        );
    }
    // Residual consistency after the whole walk.
    let fresh = problem.z().mul_vec(state.x()).unwrap();
    let drift = state
        .residual()
        .iter()
        .zip(&fresh)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let scale = 1.0 + fresh.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    assert!(drift <= 1e-8 * scale);
}

#[test]
fn objective_matches_dense_reference() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(505);
    let problem = random_problem(&mut rng, 6, 4, vec![1; 6], 0.0);
    for _ in 0..200 {
        let x: Vec<f64> = (0..6).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let fast = eval_objective(&problem, &x).unwrap();
        let dense = common::dense_objective(&problem, &x);
        assert!((fast - dense).abs() <= 1e-12 * (1.0 + dense.abs()));
    }
}
