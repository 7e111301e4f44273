//! Exact block direction subproblems.
//!
//! `two_block_direction` minimizes the pairwise model
//! `<grad_ij f(x), s> + (L_ij^alpha / 2) ||s||_alpha^2 + h(x + s)` subject to
//! `a_i^T s_i + a_j^T s_j = 0`. Scalar pairs reduce to a one-dimensional
//! piecewise quadratic along the constraint line; multi-coordinate blocks go
//! through the coupled prox (quadratic knapsack with l1 splitting).
//!
//! `tuple_direction` handles the (m+1)-block subproblem of the general
//! linearly coupled model by restricting the constraint matrix to the tuple
//! and minimizing along its one-dimensional null space.

use crate::error::{Error, Result};
use crate::problem::{BlockDirection, CompositeProblem, Coupling, SolverState, TermKind};

use super::knapsack::solve_coupled_prox;
use super::pw1d::{minimize_parts, Pw1dTerm};

/// Closed-form scalar pair direction. `kappa` is the pair constant
/// `L_ij^alpha`, `w_*` are the extended-norm weights `L^alpha`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn scalar_pair_core(
    kappa: f64,
    w_i: f64,
    w_j: f64,
    g_i: f64,
    g_j: f64,
    x_i: f64,
    x_j: f64,
    a_i: f64,
    a_j: f64,
    kind_i: TermKind,
    kind_j: TermKind,
) -> Result<(f64, f64)> {
    if a_i == 0.0 && a_j == 0.0 {
        // The constraint is vacuous: two independent 1-D problems.
        let (di, _) = minimize_parts(
            kappa * w_i,
            g_i,
            &[Pw1dTerm {
                weight: 1.0,
                offset: x_i,
                kind: kind_i,
            }],
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
        let (dj, _) = minimize_parts(
            kappa * w_j,
            g_j,
            &[Pw1dTerm {
                weight: 1.0,
                offset: x_j,
                kind: kind_j,
            }],
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
        return Ok((di, dj));
    }
    // Feasible set is the line s = t (a_j, -a_i).
    let c2 = kappa * (w_i * a_j * a_j + w_j * a_i * a_i);
    let c1 = g_i * a_j - g_j * a_i;
    let mut terms = [Pw1dTerm {
        weight: 0.0,
        offset: 0.0,
        kind: TermKind::Zero,
    }; 2];
    let mut nt = 0;
    if a_j != 0.0 {
        terms[nt] = Pw1dTerm {
            weight: a_j,
            offset: x_i,
            kind: kind_i,
        };
        nt += 1;
    }
    if a_i != 0.0 {
        terms[nt] = Pw1dTerm {
            weight: -a_i,
            offset: x_j,
            kind: kind_j,
        };
        nt += 1;
    }
    let (t, _) = minimize_parts(c2, c1, &terms[..nt], f64::NEG_INFINITY, f64::INFINITY)?;
    Ok((a_j * t, -a_i * t))
}

/// Exact minimizer of the two-block model over blocks `i != j`.
pub fn two_block_direction(
    problem: &CompositeProblem,
    state: &mut SolverState,
    i: usize,
    j: usize,
) -> Result<BlockDirection> {
    if i == j {
        return Err(Error::UnsupportedConfiguration(
            "two-block direction needs distinct blocks".into(),
        ));
    }
    let a = match problem.coupling() {
        Coupling::Single { a, .. } => a,
        Coupling::General { .. } => {
            return Err(Error::UnsupportedConfiguration(
                "two-block direction applies to a single coupling constraint".into(),
            ))
        }
    };
    let partition = problem.partition();
    let ri = partition.block_range(i);
    let rj = partition.block_range(j);
    let kappa = problem.pair_constant(i, j);

    let mut direction = BlockDirection::new();
    if ri.len() == 1 && rj.len() == 1 {
        let (ci, cj) = (ri.start, rj.start);
        let g_i = state.grad_coord(problem, ci);
        let g_j = state.grad_coord(problem, cj);
        let (di, dj) = scalar_pair_core(
            kappa,
            problem.lip_pow_alpha(i),
            problem.lip_pow_alpha(j),
            g_i,
            g_j,
            state.x()[ci],
            state.x()[cj],
            a[ci],
            a[cj],
            problem.nonsmooth().kind(ci),
            problem.nonsmooth().kind(cj),
        )?;
        direction.push_block(i, vec![di]);
        direction.push_block(j, vec![dj]);
        return Ok(direction);
    }

    // Block case: coupled prox over the concatenated coordinates with
    // per-coordinate curvature kappa * L_block^alpha.
    let coords: Vec<usize> = ri.clone().chain(rj.clone()).collect();
    let mut g = Vec::with_capacity(coords.len());
    let mut quad = Vec::with_capacity(coords.len());
    let mut xs = Vec::with_capacity(coords.len());
    let mut al = Vec::with_capacity(coords.len());
    let mut b_rhs = 0.0;
    for &c in &coords {
        let block = if ri.contains(&c) { i } else { j };
        g.push(state.grad_coord(problem, c));
        quad.push(kappa * problem.lip_pow_alpha(block));
        xs.push(state.x()[c]);
        al.push(a[c]);
        b_rhs += a[c] * state.x()[c];
    }
    let mut kind = |p: usize| problem.nonsmooth().kind(coords[p]);
    let y = solve_coupled_prox(&g, &quad, &xs, &al, b_rhs, &mut kind)?;
    let di: Vec<f64> = (0..ri.len()).map(|p| y[p] - xs[p]).collect();
    let dj: Vec<f64> = (0..rj.len())
        .map(|p| y[ri.len() + p] - xs[ri.len() + p])
        .collect();
    direction.push_block(i, di);
    direction.push_block(j, dj);
    Ok(direction)
}

/// Outcome of the tuple subproblem: either a direction or a request to
/// resample because the restricted constraint matrix lost rank.
#[derive(Clone, Debug)]
pub enum TupleOutcome {
    Direction(BlockDirection),
    Resample,
}

/// Direction over an (m+1)-tuple of scalar blocks for general coupling
/// `A x = b`: restrict `A` to the tuple columns, minimize the Euclidean
/// model along the 1-dimensional null space.
pub fn tuple_direction(
    problem: &CompositeProblem,
    state: &mut SolverState,
    tuple: &[usize],
) -> Result<TupleOutcome> {
    let a_mat = match problem.coupling() {
        Coupling::General { a_mat, .. } => a_mat,
        Coupling::Single { .. } => {
            return Err(Error::UnsupportedConfiguration(
                "tuple direction applies to general coupling; lift the single constraint first"
                    .into(),
            ))
        }
    };
    let m = a_mat.nrows();
    if tuple.len() != m + 1 {
        return Err(Error::DimensionMismatch {
            what: "tuple size",
            expected: m + 1,
            got: tuple.len(),
        });
    }
    let partition = problem.partition();
    for &blk in tuple {
        if partition.block_size(blk) != 1 {
            return Err(Error::UnsupportedConfiguration(
                "tuple direction supports scalar blocks only".into(),
            ));
        }
    }
    for w in 0..tuple.len() {
        for v in w + 1..tuple.len() {
            if tuple[w] == tuple[v] {
                return Err(Error::UnsupportedConfiguration(
                    "tuple blocks must be distinct".into(),
                ));
            }
        }
    }
    let coords: Vec<usize> = tuple.iter().map(|&blk| partition.block_range(blk).start).collect();

    // Restricted m x (m+1) constraint matrix.
    let mut b_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for r in 0..m {
        b_rows.push(coords.iter().map(|&c| a_mat.get(r, c)).collect());
    }
    let v = match null_space_1d(&mut b_rows) {
        Some(v) => v,
        None => return Ok(TupleOutcome::Resample),
    };

    let l_tuple = problem.tuple_constant(tuple);
    let norm_sq: f64 = v.iter().map(|vi| vi * vi).sum();
    let c2 = l_tuple * norm_sq;
    let mut c1 = 0.0;
    let mut terms: Vec<Pw1dTerm> = Vec::with_capacity(coords.len());
    for (p, &c) in coords.iter().enumerate() {
        if v[p] == 0.0 {
            continue;
        }
        c1 += state.grad_coord(problem, c) * v[p];
        terms.push(Pw1dTerm {
            weight: v[p],
            offset: state.x()[c],
            kind: problem.nonsmooth().kind(c),
        });
    }
    let (t, _) = minimize_parts(c2, c1, &terms, f64::NEG_INFINITY, f64::INFINITY)?;

    let mut direction = BlockDirection::new();
    for (p, &blk) in tuple.iter().enumerate() {
        direction.push_block(blk, vec![t * v[p]]);
    }
    Ok(TupleOutcome::Direction(direction))
}

/// Null space basis of an `m x (m+1)` matrix when it has full row rank;
/// `None` when the rank is deficient. Gaussian elimination with partial
/// pivoting, in place.
#[allow(clippy::needless_range_loop)]
fn null_space_1d(rows: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let m = rows.len();
    let n = m + 1;
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let tol = 1e-12 * scale;
    let mut pivot_col = vec![usize::MAX; m];
    let mut used_cols = vec![false; n];
    for r in 0..m {
        // Largest remaining entry in this row's eligible columns.
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for c in 0..n {
            if !used_cols[c] && rows[r][c].abs() > best.0 {
                best = (rows[r][c].abs(), c);
            }
        }
        // Partial pivoting over rows for stability: swap up the row with the
        // largest entry in any unused column among rows r..m.
        let mut best_row = r;
        let mut best_val = best.0;
        let mut best_col = best.1;
        for rr in r + 1..m {
            for c in 0..n {
                if !used_cols[c] && rows[rr][c].abs() > best_val {
                    best_val = rows[rr][c].abs();
                    best_row = rr;
                    best_col = c;
                }
            }
        }
        if best_val <= tol {
            return None; // rank deficient
        }
        rows.swap(r, best_row);
        let p = best_col;
        pivot_col[r] = p;
        used_cols[p] = true;
        let pv = rows[r][p];
        for rr in 0..m {
            if rr != r && rows[rr][p] != 0.0 {
                let factor = rows[rr][p] / pv;
                for c in 0..n {
                    rows[rr][c] -= factor * rows[r][c];
                }
                rows[rr][p] = 0.0;
            }
        }
    }
    let free = (0..n).find(|&c| !used_cols[c])?;
    let mut v = vec![0.0; n];
    v[free] = 1.0;
    for r in 0..m {
        let p = pivot_col[r];
        v[p] = -rows[r][free] / rows[r][p];
    }
    Some(v)
}
