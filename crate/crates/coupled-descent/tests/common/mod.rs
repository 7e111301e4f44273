//! Independent oracles shared by the integration and acceptance tests.
//!
//! Everything here recomputes results through dense, brute-force or
//! enumerative routes that share no code with the solver paths they check.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use coupled_descent::problem::{CompositeProblem, TermKind};
use coupled_descent::rng::Xoshiro256PlusPlus;

/// Dense reference evaluation of `F(x)` (dense matrix product, no residual
/// caching).
pub fn dense_objective(problem: &CompositeProblem, x: &[f64]) -> f64 {
    let dense = problem.z().to_dense();
    let m = dense.len();
    let mut quad = 0.0;
    for row in dense.iter().take(m) {
        let zx: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
        quad += zx * zx;
    }
    let lin: f64 = problem.q().iter().zip(x).map(|(a, b)| a * b).sum();
    let mut h = 0.0;
    for (c, &xc) in x.iter().enumerate() {
        let hv = problem.nonsmooth().kind(c).eval(xc);
        if hv == f64::INFINITY {
            return f64::INFINITY;
        }
        h += hv;
    }
    0.5 * quad + lin + h
}

/// Dense full gradient `Z^T Z x + q`.
pub fn dense_gradient(problem: &CompositeProblem, x: &[f64]) -> Vec<f64> {
    let dense = problem.z().to_dense();
    let m = dense.len();
    let n = x.len();
    let zx: Vec<f64> = (0..m)
        .map(|r| dense[r].iter().zip(x).map(|(a, b)| a * b).sum())
        .collect();
    (0..n)
        .map(|c| {
            let mut g = problem.q()[c];
            for r in 0..m {
                g += dense[r][c] * zx[r];
            }
            g
        })
        .collect()
}

/// Gaussian elimination with partial pivoting; returns `None` on a
/// numerically singular system.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for r in &a {
        assert_eq!(r.len(), n);
    }
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pivot_val < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / a[i][i]).collect())
}

/// Exact minimizer of `1/2 x' Q x + q' x + box indicator` subject to
/// `A x = b`, by enumerating all lo/hi/free activity patterns (3^n).
/// `bounds[c] = (lo, hi)` with infinite entries allowed.
pub fn dense_box_qp_oracle(
    q_mat: &[Vec<f64>],
    q_lin: &[f64],
    a_rows: &[Vec<f64>],
    b: &[f64],
    bounds: &[(f64, f64)],
) -> Option<(Vec<f64>, f64)> {
    let n = q_lin.len();
    let m = a_rows.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let patterns = 3usize.pow(n as u32);
    'pattern: for pat in 0..patterns {
        let mut code = pat;
        let mut x = vec![0.0; n];
        let mut free = Vec::new();
        for c in 0..n {
            match code % 3 {
                0 => {
                    if !bounds[c].0.is_finite() {
                        continue 'pattern;
                    }
                    x[c] = bounds[c].0;
                }
                1 => {
                    if !bounds[c].1.is_finite() {
                        continue 'pattern;
                    }
                    x[c] = bounds[c].1;
                }
                _ => free.push(c),
            }
            code /= 3;
        }
        let k = free.len();
        // KKT system over free coordinates and multipliers.
        let dim = k + m;
        let mut kkt = vec![vec![0.0; dim]; dim];
        let mut rhs = vec![0.0; dim];
        for (i, &ci) in free.iter().enumerate() {
            for (j, &cj) in free.iter().enumerate() {
                kkt[i][j] = q_mat[ci][cj];
            }
            for r in 0..m {
                kkt[i][k + r] = a_rows[r][ci];
                kkt[k + r][i] = a_rows[r][ci];
            }
            let mut v = -q_lin[ci];
            for c in 0..n {
                if !free.contains(&c) {
                    v -= q_mat[ci][c] * x[c];
                }
            }
            rhs[i] = v;
        }
        for r in 0..m {
            let mut v = b[r];
            for c in 0..n {
                if !free.contains(&c) {
                    v -= a_rows[r][c] * x[c];
                }
            }
            rhs[k + r] = v;
        }
        let sol = if dim > 0 {
            match solve_dense(kkt, rhs) {
                Some(s) => s,
                None => continue,
            }
        } else {
            Vec::new()
        };
        for (i, &ci) in free.iter().enumerate() {
            x[ci] = sol[i];
        }
        // Feasibility.
        for c in 0..n {
            if x[c] < bounds[c].0 - 1e-9 || x[c] > bounds[c].1 + 1e-9 {
                continue 'pattern;
            }
        }
        for r in 0..m {
            let ax: f64 = a_rows[r].iter().zip(&x).map(|(a, b)| a * b).sum();
            if (ax - b[r]).abs() > 1e-7 * (1.0 + b[r].abs()) {
                continue 'pattern;
            }
        }
        let mut obj = 0.0;
        for i in 0..n {
            obj += q_lin[i] * x[i];
            for j in 0..n {
                obj += 0.5 * x[i] * q_mat[i][j] * x[j];
            }
        }
        if best.as_ref().is_none_or(|(_, bv)| obj < *bv) {
            best = Some((x, obj));
        }
    }
    best
}

/// Smallest enclosing ball by enumeration of boundary subsets of size
/// `1..=dim+1`. Exact for small instances.
pub fn enclosing_ball_oracle(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = points.len();
    let dim = points[0].len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut subset = Vec::new();
    enumerate_subsets(n, (dim + 1).min(n), &mut subset, &mut |s| {
        if let Some((center, radius)) = circumball(points, s) {
            let enclosing = points.iter().all(|p| {
                let d2: f64 = p
                    .iter()
                    .zip(&center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2.sqrt() <= radius + 1e-9 * (1.0 + radius)
            });
            if enclosing && best.as_ref().is_none_or(|(_, br)| radius < *br) {
                best = Some((center, radius));
            }
        }
    });
    best.expect("at least the singleton subsets produce balls")
}

fn enumerate_subsets(
    n: usize,
    max_size: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    fn rec(
        start: usize,
        n: usize,
        max_size: usize,
        current: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if !current.is_empty() {
            visit(current);
        }
        if current.len() == max_size {
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, max_size, current, visit);
            current.pop();
        }
    }
    rec(0, n, max_size, current, visit);
}

/// Center and radius of the smallest ball with all of `subset` on its
/// boundary (the circumball within the subset's affine hull).
fn circumball(points: &[Vec<f64>], subset: &[usize]) -> Option<(Vec<f64>, f64)> {
    let p0 = &points[subset[0]];
    let k = subset.len() - 1;
    if k == 0 {
        return Some((p0.clone(), 0.0));
    }
    let vs: Vec<Vec<f64>> = subset[1..]
        .iter()
        .map(|&i| points[i].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    // Solve 2 V'V beta = (||v_i||^2)_i.
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = 2.0 * vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum::<f64>();
        }
        rhs[i] = vs[i].iter().map(|v| v * v).sum();
    }
    let beta = solve_dense(gram, rhs)?;
    let mut center = p0.clone();
    for (i, v) in vs.iter().enumerate() {
        for (c, vc) in center.iter_mut().zip(v) {
            *c += beta[i] * vc;
        }
    }
    let radius = center
        .iter()
        .zip(p0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Some((center, radius))
}

/// Active-set enumeration oracle for the uniform quadratic knapsack:
/// every coordinate at `lo`, at `hi`, or free; free coordinates solve the
/// equality-constrained QP in closed form. Exponential in `d`.
pub fn knapsack_enumeration_oracle(
    g: &[f64],
    l: f64,
    a: &[f64],
    b: f64,
    lo: &[f64],
    hi: &[f64],
) -> Option<Vec<f64>> {
    let d = g.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let patterns = 3usize.pow(d as u32);
    'pattern: for pat in 0..patterns {
        let mut code = pat;
        let mut s = vec![0.0; d];
        let mut free = Vec::new();
        let mut fixed_sum = 0.0;
        for c in 0..d {
            match code % 3 {
                0 => {
                    s[c] = lo[c];
                    fixed_sum += a[c] * lo[c];
                }
                1 => {
                    s[c] = hi[c];
                    fixed_sum += a[c] * hi[c];
                }
                _ => free.push(c),
            }
            code /= 3;
        }
        let a2: f64 = free.iter().map(|&c| a[c] * a[c]).sum();
        if free.is_empty() {
            if (fixed_sum - b).abs() > 1e-9 * (1.0 + b.abs()) {
                continue;
            }
        } else if a2 < 1e-14 {
            for &c in &free {
                s[c] = -g[c] / l;
            }
            let total: f64 = s.iter().zip(a).map(|(si, ai)| si * ai).sum();
            if (total - b).abs() > 1e-9 * (1.0 + b.abs()) {
                continue;
            }
        } else {
            let num: f64 = free.iter().map(|&c| a[c] * -g[c] / l).sum();
            let mu = (num - (b - fixed_sum)) * l / a2;
            for &c in &free {
                s[c] = (-g[c] - mu * a[c]) / l;
            }
        }
        for &c in &free {
            if s[c] < lo[c] - 1e-10 || s[c] > hi[c] + 1e-10 {
                continue 'pattern;
            }
        }
        let obj: f64 = s
            .iter()
            .zip(g)
            .map(|(si, gi)| gi * si + 0.5 * l * si * si)
            .sum();
        if best.as_ref().is_none_or(|(bv, _)| obj < *bv) {
            best = Some((obj, s));
        }
    }
    best.map(|(_, s)| s)
}

/// Random separable term of the given flavor, keeping `anchor` feasible.
pub fn random_kind(rng: &mut Xoshiro256PlusPlus, flavor: usize, anchor: f64) -> TermKind {
    match flavor {
        0 => TermKind::L1 {
            lambda: rng.uniform(0.05, 1.5),
        },
        1 => {
            let lo = anchor - rng.uniform(0.2, 2.0);
            let hi = anchor + rng.uniform(0.2, 2.0);
            TermKind::Box { lo, hi }
        }
        _ => {
            let lo = anchor - rng.uniform(0.2, 2.0);
            let hi = anchor + rng.uniform(0.2, 2.0);
            TermKind::L1Box {
                lambda: rng.uniform(0.05, 1.5),
                lo,
                hi,
            }
        }
    }
}
