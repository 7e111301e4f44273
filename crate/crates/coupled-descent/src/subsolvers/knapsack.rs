//! Continuous quadratic knapsack: minimize a separable strictly convex
//! quadratic over one linear equality and box bounds.
//!
//! `min  sum_c quad_c/2 s_c^2 + lin_c s_c   s.t.  a^T s = b,  lo <= s <= hi`
//!
//! Solved by breakpoint search on the dual multiplier `mu`:
//! `s_c(mu) = clip((-lin_c - mu a_c) / quad_c, lo_c, hi_c)` with
//! `a^T s(mu)` piecewise linear and nonincreasing in `mu`. Breakpoints are
//! sorted once, giving `O(d log d)`.

use crate::error::{Error, Result};
use crate::problem::TermKind;

#[derive(Clone, Copy)]
struct Event {
    mu: f64,
    coord: usize,
    is_entry: bool,
}

/// Exact minimizer of the weighted problem, together with the multiplier.
pub(crate) fn weighted_knapsack_with_multiplier(
    quad: &[f64],
    lin: &[f64],
    a: &[f64],
    b: f64,
    lo: &[f64],
    hi: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let d = quad.len();
    for (name, v) in [("lin", lin), ("a", a), ("lo", lo), ("hi", hi)] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                what: "knapsack input",
                expected: d,
                got: v.len(),
            });
        }
        let _ = name;
    }
    for c in 0..d {
        if quad[c].is_nan() || quad[c] <= 0.0 || !quad[c].is_finite() {
            return Err(Error::InvalidProblem(format!(
                "knapsack quadratic weight {} must be positive and finite",
                quad[c]
            )));
        }
        if lo[c] > hi[c] {
            return Err(Error::Infeasible(format!(
                "coordinate {c}: box [{}, {}] is empty",
                lo[c], hi[c]
            )));
        }
    }

    // mu-independent coordinates.
    let clip_free = |c: usize| (-lin[c] / quad[c]).clamp(lo[c], hi[c]);

    // Range of a^T s over the box (for the feasibility check).
    let mut phi_max = 0.0;
    let mut phi_min = 0.0;
    let mut max_inf = false;
    let mut min_inf = false;
    let mut any_active = false;
    for c in 0..d {
        if a[c] == 0.0 {
            continue;
        }
        any_active = true;
        let (init, fin) = if a[c] > 0.0 {
            (hi[c], lo[c])
        } else {
            (lo[c], hi[c])
        };
        if init.is_finite() {
            phi_max += a[c] * init;
        } else {
            max_inf = true;
        }
        if fin.is_finite() {
            phi_min += a[c] * fin;
        } else {
            min_inf = true;
        }
    }

    if !any_active {
        let scale = 1.0 + b.abs();
        if b.abs() > 1e-9 * scale {
            return Err(Error::Infeasible(
                "all coupling coefficients vanish but the right-hand side does not".into(),
            ));
        }
        let s = (0..d).map(clip_free).collect();
        return Ok((s, 0.0));
    }

    let range_scale = 1.0
        + b.abs()
        + if max_inf { 0.0 } else { phi_max.abs() }
        + if min_inf { 0.0 } else { phi_min.abs() };
    let tol = 1e-9 * range_scale;
    if (!max_inf && b > phi_max + tol) || (!min_inf && b < phi_min - tol) {
        return Err(Error::Infeasible(format!(
            "target {b} outside achievable range [{}, {}]",
            if min_inf { f64::NEG_INFINITY } else { phi_min },
            if max_inf { f64::INFINITY } else { phi_max }
        )));
    }

    // Sweep state: coordinates at a bound contribute a constant, interior
    // coordinates contribute -a lin / quad - mu a^2 / quad.
    let mut const_sum = 0.0;
    let mut a1 = 0.0;
    let mut a2 = 0.0;
    let mut events: Vec<Event> = Vec::with_capacity(2 * d);
    for c in 0..d {
        if a[c] == 0.0 {
            continue;
        }
        let init = if a[c] > 0.0 { hi[c] } else { lo[c] };
        let fin = if a[c] > 0.0 { lo[c] } else { hi[c] };
        let entry = if init.is_finite() {
            (-lin[c] - quad[c] * init) / a[c]
        } else {
            f64::NEG_INFINITY
        };
        let exit = if fin.is_finite() {
            (-lin[c] - quad[c] * fin) / a[c]
        } else {
            f64::INFINITY
        };
        if entry.is_finite() {
            events.push(Event {
                mu: entry,
                coord: c,
                is_entry: true,
            });
            const_sum += a[c] * init;
        } else {
            a1 += a[c] * lin[c] / quad[c];
            a2 += a[c] * a[c] / quad[c];
        }
        if exit.is_finite() {
            events.push(Event {
                mu: exit,
                coord: c,
                is_entry: false,
            });
        }
    }
    events.sort_unstable_by(|x, y| {
        x.mu
            .partial_cmp(&y.mu)
            .unwrap()
            .then_with(|| y.is_entry.cmp(&x.is_entry))
    });

    let phi_at = |const_sum: f64, a1: f64, a2: f64, mu: f64| const_sum - a1 - mu * a2;
    let mut mu_star = None;
    let mut prev_mu = f64::NEG_INFINITY;
    for ev in &events {
        // Segment [prev_mu, ev.mu] with the current state.
        if phi_at(const_sum, a1, a2, ev.mu) <= b {
            mu_star = Some(if a2 > 0.0 {
                ((const_sum - a1 - b) / a2).clamp(prev_mu.max(f64::MIN), ev.mu)
            } else {
                // phi constant on the segment; b matches it within tolerance.
                if prev_mu.is_finite() { prev_mu } else { ev.mu }
            });
            break;
        }
        // Apply the event and move on.
        let c = ev.coord;
        if ev.is_entry {
            let init = if a[c] > 0.0 { hi[c] } else { lo[c] };
            const_sum -= a[c] * init;
            a1 += a[c] * lin[c] / quad[c];
            a2 += a[c] * a[c] / quad[c];
        } else {
            let fin = if a[c] > 0.0 { lo[c] } else { hi[c] };
            a1 -= a[c] * lin[c] / quad[c];
            a2 -= a[c] * a[c] / quad[c];
            const_sum += a[c] * fin;
        }
        prev_mu = ev.mu;
    }
    let mut mu = match mu_star {
        Some(mu) => mu,
        None => {
            // Final segment [last event, +inf).
            if a2 > 0.0 {
                (const_sum - a1 - b) / a2
            } else if prev_mu.is_finite() {
                prev_mu
            } else {
                0.0
            }
        }
    };

    let eval_s = |mu: f64, c: usize| ((-lin[c] - mu * a[c]) / quad[c]).clamp(lo[c], hi[c]);
    let mut s: Vec<f64> = (0..d)
        .map(|c| if a[c] == 0.0 { clip_free(c) } else { eval_s(mu, c) })
        .collect();

    // Newton polish of the multiplier on the exact piecewise-linear phi.
    for _ in 0..3 {
        let res: f64 = s.iter().zip(a).map(|(si, ai)| si * ai).sum::<f64>() - b;
        if res.abs() <= 1e-13 * range_scale {
            break;
        }
        let mut slope = 0.0;
        for c in 0..d {
            if a[c] == 0.0 {
                continue;
            }
            let raw = (-lin[c] - mu * a[c]) / quad[c];
            if raw > lo[c] && raw < hi[c] {
                slope += a[c] * a[c] / quad[c];
            }
        }
        if slope == 0.0 {
            break;
        }
        mu += res / slope;
        for c in 0..d {
            if a[c] != 0.0 {
                s[c] = eval_s(mu, c);
            }
        }
    }

    Ok((s, mu))
}

/// Exact minimizer of `<g, s> + (L/2) ||s||^2` over `{a^T s = b, lo <= s <= hi}`.
pub fn quadratic_knapsack(
    g: &[f64],
    l: f64,
    a: &[f64],
    b: f64,
    lo: &[f64],
    hi: &[f64],
) -> Result<Vec<f64>> {
    quadratic_knapsack_with_multiplier(g, l, a, b, lo, hi).map(|(s, _)| s)
}

/// `quadratic_knapsack` that also returns the equality multiplier, for KKT
/// verification.
pub fn quadratic_knapsack_with_multiplier(
    g: &[f64],
    l: f64,
    a: &[f64],
    b: f64,
    lo: &[f64],
    hi: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if l.is_nan() || l <= 0.0 || !l.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "knapsack curvature {l} must be positive"
        )));
    }
    let quad = vec![l; g.len()];
    weighted_knapsack_with_multiplier(&quad, g, a, b, lo, hi)
}

/// Euclidean projection onto the probability simplex
/// `{x : sum x = 1, x >= 0}`, as the knapsack special case.
pub fn simplex_projection(y: &[f64]) -> Vec<f64> {
    let d = y.len();
    let g: Vec<f64> = y.iter().map(|v| -v).collect();
    let a = vec![1.0; d];
    let lo = vec![0.0; d];
    let hi = vec![f64::INFINITY; d];
    quadratic_knapsack(&g, 1.0, &a, 1.0, &lo, &hi)
        .expect("simplex projection is always feasible")
}

/// Max KKT violation of a candidate knapsack solution, normalized by the
/// problem scale. Stationarity is checked with the supplied multiplier,
/// complementary slackness through the sign conditions at active bounds.
#[allow(clippy::too_many_arguments)]
pub fn knapsack_kkt_residual(
    quad: &[f64],
    lin: &[f64],
    a: &[f64],
    b: f64,
    lo: &[f64],
    hi: &[f64],
    s: &[f64],
    mu: f64,
) -> f64 {
    let d = quad.len();
    let mut scale = 1.0 + b.abs() + mu.abs();
    for c in 0..d {
        scale = scale
            .max(lin[c].abs())
            .max((quad[c] * s[c]).abs())
            .max((mu * a[c]).abs());
    }
    let mut worst: f64 = (s.iter().zip(a).map(|(si, ai)| si * ai).sum::<f64>() - b).abs();
    for c in 0..d {
        let grad = quad[c] * s[c] + lin[c] + mu * a[c];
        let width = hi[c] - lo[c];
        let at_lo = (s[c] - lo[c]).abs() <= 1e-12 * (1.0 + lo[c].abs()).min(width.abs() + 1.0);
        let at_hi = (hi[c] - s[c]).abs() <= 1e-12 * (1.0 + hi[c].abs()).min(width.abs() + 1.0);
        let viol = if at_lo && at_hi {
            0.0
        } else if at_lo {
            (-grad).max(0.0)
        } else if at_hi {
            grad.max(0.0)
        } else {
            grad.abs()
        };
        worst = worst.max(viol);
        worst = worst.max((lo[c] - s[c]).max(0.0)).max((s[c] - hi[c]).max(0.0));
    }
    worst / scale
}

/// Solves `min_y sum_c [quad_c/2 (y_c - x_c)^2 + g_c (y_c - x_c) + h_c(y_c)]`
/// subject to `a^T y = b_rhs`, with `h_c` an l1/box term.
///
/// l1 pieces whose box straddles zero are handled by the nonnegative split
/// `y = y+ - y-`, which doubles those coordinates; complementarity holds
/// automatically because the quadratic weights are positive.
pub(crate) fn solve_coupled_prox(
    g: &[f64],
    quad: &[f64],
    x: &[f64],
    a: &[f64],
    b_rhs: f64,
    kind_of: &mut dyn FnMut(usize) -> TermKind,
) -> Result<Vec<f64>> {
    let n = g.len();
    let mut zq = Vec::with_capacity(2 * n);
    let mut zl = Vec::with_capacity(2 * n);
    let mut za = Vec::with_capacity(2 * n);
    let mut zlo = Vec::with_capacity(2 * n);
    let mut zhi = Vec::with_capacity(2 * n);
    // For each position: index of its direct/plus variable, and of the minus
    // variable when split.
    let mut plus = Vec::with_capacity(n);
    let mut minus: Vec<Option<usize>> = Vec::with_capacity(n);

    for p in 0..n {
        let (lambda, lo, hi) = kind_of(p).parts();
        let base = g[p] - quad[p] * x[p];
        if lambda == 0.0 {
            plus.push(zq.len());
            minus.push(None);
            zq.push(quad[p]);
            zl.push(base);
            za.push(a[p]);
            zlo.push(lo);
            zhi.push(hi);
        } else if lo >= 0.0 {
            // |y| = y on the domain.
            plus.push(zq.len());
            minus.push(None);
            zq.push(quad[p]);
            zl.push(base + lambda);
            za.push(a[p]);
            zlo.push(lo);
            zhi.push(hi);
        } else if hi <= 0.0 {
            plus.push(zq.len());
            minus.push(None);
            zq.push(quad[p]);
            zl.push(base - lambda);
            za.push(a[p]);
            zlo.push(lo);
            zhi.push(hi);
        } else {
            plus.push(zq.len());
            zq.push(quad[p]);
            zl.push(base + lambda);
            za.push(a[p]);
            zlo.push(0.0);
            zhi.push(hi);
            minus.push(Some(zq.len()));
            zq.push(quad[p]);
            zl.push(-base + lambda);
            za.push(-a[p]);
            zlo.push(0.0);
            zhi.push(-lo);
        }
    }

    let (sz, _) = weighted_knapsack_with_multiplier(&zq, &zl, &za, b_rhs, &zlo, &zhi)?;
    let mut y = Vec::with_capacity(n);
    for p in 0..n {
        let v = sz[plus[p]] - minus[p].map_or(0.0, |m| sz[m]);
        y.push(v);
    }
    Ok(y)
}
