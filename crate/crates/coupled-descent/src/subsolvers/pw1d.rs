//! Exact minimization of one-dimensional convex piecewise quadratics.
//!
//! Every scalar subproblem in the crate reduces to
//! `phi(t) = 1/2 c2 t^2 + c1 t + sum_k h_k(u_k + v_k t)` over an interval,
//! where each `h_k` contributes at most one kink (at zero) and at most one
//! box restriction. The minimizer is found by scanning the kink segments and
//! clamping the parabola vertex into each one.

use crate::error::{Error, Result};
use crate::problem::TermKind;

/// One composed term `h_k(u_k + v_k t)`.
#[derive(Clone, Copy, Debug)]
pub struct Pw1dTerm {
    /// Slope `v_k` of the affine reparameterization.
    pub weight: f64,
    /// Offset `u_k`.
    pub offset: f64,
    /// Shape of `h_k`.
    pub kind: TermKind,
}

/// A one-dimensional restriction of the model used by the exact subproblem
/// solvers.
#[derive(Clone, Debug)]
pub struct PiecewiseQuadratic1D {
    /// Quadratic coefficient (`phi` contains `1/2 c2 t^2`); must be >= 0.
    pub c2: f64,
    /// Linear coefficient.
    pub c1: f64,
    /// Composed nonsmooth terms.
    pub terms: Vec<Pw1dTerm>,
    /// Lower end of the domain (may be `-inf`).
    pub t_lo: f64,
    /// Upper end of the domain (may be `+inf`).
    pub t_hi: f64,
}

impl PiecewiseQuadratic1D {
    pub fn unconstrained(c2: f64, c1: f64, terms: Vec<Pw1dTerm>) -> Self {
        PiecewiseQuadratic1D {
            c2,
            c1,
            terms,
            t_lo: f64::NEG_INFINITY,
            t_hi: f64::INFINITY,
        }
    }

    /// Evaluates `phi(t)`. Box indicators evaluate to `+inf` outside their
    /// domain (modulo a one-ulp clamp used for points produced by the
    /// minimizer itself).
    pub fn eval(&self, t: f64) -> f64 {
        eval_parts(self.c2, self.c1, &self.terms, t)
    }
}

/// Returns the global minimizer and its value. Ties (flat minimizer
/// intervals) are broken toward the smallest `|t|`.
pub fn pw1d_minimize(phi: &PiecewiseQuadratic1D) -> Result<(f64, f64)> {
    minimize_parts(phi.c2, phi.c1, &phi.terms, phi.t_lo, phi.t_hi)
}

/// Left and right derivatives of `phi` at `t` (`-inf`/`+inf` at domain
/// boundaries). Test helper for the optimality certificate.
pub fn subgradient_interval(phi: &PiecewiseQuadratic1D, t: f64) -> (f64, f64) {
    let (lo, hi) = match effective_domain(&phi.terms, phi.t_lo, phi.t_hi) {
        Ok(d) => d,
        Err(_) => return (f64::NAN, f64::NAN),
    };
    let smooth = phi.c2 * t + phi.c1;
    let mut left = smooth;
    let mut right = smooth;
    for term in &phi.terms {
        let (lambda, _, _) = term.kind.parts();
        if lambda == 0.0 || term.weight == 0.0 {
            continue;
        }
        let arg = term.offset + term.weight * t;
        let scale = 1.0 + term.offset.abs() + (term.weight * t).abs();
        if arg.abs() <= 1e-12 * scale {
            left -= lambda * term.weight.abs();
            right += lambda * term.weight.abs();
        } else {
            let d = lambda * term.weight * arg.signum();
            left += d;
            right += d;
        }
    }
    let tol = 1e-12 * (1.0 + t.abs());
    if (t - lo).abs() <= tol {
        left = f64::NEG_INFINITY;
    }
    if (t - hi).abs() <= tol {
        right = f64::INFINITY;
    }
    (left, right)
}

fn eval_parts(c2: f64, c1: f64, terms: &[Pw1dTerm], t: f64) -> f64 {
    let mut v = 0.5 * c2 * t * t + c1 * t;
    for term in terms {
        let arg = term.offset + term.weight * t;
        let (lambda, lo, hi) = term.kind.parts();
        // Candidates are generated inside the effective domain; clamp to
        // absorb the rounding of (bound - offset) / weight round trips.
        let scale = 1.0 + arg.abs() + lo.abs().min(1e300) + hi.abs().min(1e300);
        if arg < lo - 1e-9 * scale || arg > hi + 1e-9 * scale {
            return f64::INFINITY;
        }
        v += lambda * arg.clamp(lo, hi).abs();
    }
    v
}

/// Intersects the input domain with the preimages of all box terms.
fn effective_domain(terms: &[Pw1dTerm], t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
    let mut lo = t_lo;
    let mut hi = t_hi;
    for term in terms {
        let (_, bl, bh) = term.kind.parts();
        if bl == f64::NEG_INFINITY && bh == f64::INFINITY {
            continue;
        }
        if term.weight > 0.0 {
            lo = lo.max((bl - term.offset) / term.weight);
            hi = hi.min((bh - term.offset) / term.weight);
        } else if term.weight < 0.0 {
            lo = lo.max((bh - term.offset) / term.weight);
            hi = hi.min((bl - term.offset) / term.weight);
        } else if term.offset < bl || term.offset > bh {
            return Err(Error::Infeasible(
                "constant term violates its box".into(),
            ));
        }
    }
    if lo > hi {
        // A feasible current point maps to t = 0; a microscopically inverted
        // interval is rounding noise from the bound division.
        let span = lo - hi;
        if span <= 1e-9 * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            return Ok((mid, mid));
        }
        return Err(Error::Infeasible("empty one-dimensional domain".into()));
    }
    Ok((lo, hi))
}

/// Core minimizer over explicit parts; used allocation-free by the scalar
/// pair fast path.
pub(crate) fn minimize_parts(
    c2: f64,
    c1: f64,
    terms: &[Pw1dTerm],
    t_lo: f64,
    t_hi: f64,
) -> Result<(f64, f64)> {
    if !c2.is_finite() || !c1.is_finite() {
        return Err(Error::InvalidProblem("nonfinite pw1d coefficients".into()));
    }
    if c2 < 0.0 {
        return Err(Error::InvalidProblem(
            "negative quadratic coefficient makes phi nonconvex".into(),
        ));
    }
    let (lo, hi) = effective_domain(terms, t_lo, t_hi)?;

    // Kink locations of the l1 pieces, mapped into t.
    let mut kinks = [0.0_f64; 8];
    let mut kinks_heap: Vec<f64>;
    let kink_slice: &mut [f64] = if terms.len() <= 8 {
        &mut kinks
    } else {
        kinks_heap = vec![0.0; terms.len()];
        &mut kinks_heap
    };
    let mut nk = 0;
    for term in terms {
        let (lambda, _, _) = term.kind.parts();
        if lambda > 0.0 && term.weight != 0.0 {
            let k = -term.offset / term.weight;
            if k > lo && k < hi {
                kink_slice[nk] = k;
                nk += 1;
            }
        }
    }
    let kinks = &mut kink_slice[..nk];
    kinks.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let mut best_t = f64::NAN;
    let mut best_v = f64::INFINITY;
    let consider = |t: f64, v: f64, best_t: &mut f64, best_v: &mut f64| {
        if v < *best_v || (v == *best_v && t.abs() < best_t.abs()) {
            *best_v = v;
            *best_t = t;
        }
    };

    for seg in 0..=kinks.len() {
        let seg_lo = if seg == 0 { lo } else { kinks[seg - 1] };
        let seg_hi = if seg == kinks.len() { hi } else { kinks[seg] };
        if seg_lo > seg_hi {
            continue;
        }
        // Representative point fixing the sign of every |.| on this segment.
        let rep = match (seg_lo.is_finite(), seg_hi.is_finite()) {
            (true, true) => 0.5 * (seg_lo + seg_hi),
            (true, false) => seg_lo + 1.0,
            (false, true) => seg_hi - 1.0,
            (false, false) => 0.0,
        };
        let mut lin = c1;
        for term in terms {
            let (lambda, _, _) = term.kind.parts();
            if lambda > 0.0 && term.weight != 0.0 {
                lin += lambda * term.weight * (term.offset + term.weight * rep).signum();
            }
        }
        if c2 > 0.0 {
            let vertex = -lin / c2;
            let t = vertex.clamp(seg_lo, seg_hi);
            consider(t, eval_parts(c2, c1, terms, t), &mut best_t, &mut best_v);
        } else {
            // Linear on this segment.
            if lin > 0.0 {
                if seg_lo == f64::NEG_INFINITY {
                    return Err(Error::Unbounded);
                }
                consider(
                    seg_lo,
                    eval_parts(c2, c1, terms, seg_lo),
                    &mut best_t,
                    &mut best_v,
                );
            } else if lin < 0.0 {
                if seg_hi == f64::INFINITY {
                    return Err(Error::Unbounded);
                }
                consider(
                    seg_hi,
                    eval_parts(c2, c1, terms, seg_hi),
                    &mut best_t,
                    &mut best_v,
                );
            } else {
                // Flat segment: prefer the smallest-magnitude point.
                let t = 0.0_f64.clamp(seg_lo, seg_hi);
                consider(t, eval_parts(c2, c1, terms, t), &mut best_t, &mut best_v);
            }
        }
    }

    if !best_t.is_finite() {
        return Err(Error::Unbounded);
    }
    Ok((best_t, best_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256PlusPlus;

    fn grid_minimize(phi: &PiecewiseQuadratic1D, lo: f64, hi: f64, step: f64) -> (f64, f64) {
        let mut best = (f64::NAN, f64::INFINITY);
        let mut t = lo;
        while t <= hi {
            let v = phi.eval(t);
            if v < best.1 {
                best = (t, v);
            }
            t += step;
        }
        best
    }

    #[test]
    fn pure_quadratic_vertex() {
        // phi(t) = 2 t^2 - 4 t: minimum at t = 1, value -2.
        let phi = PiecewiseQuadratic1D::unconstrained(4.0, -4.0, vec![]);
        let (t, v) = pw1d_minimize(&phi).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert!((v + 2.0).abs() < 1e-15);
    }

    #[test]
    fn l1_kink_matches_grid() {
        // phi(t) = 1/2 t^2 + |t - 1|.
        let phi = PiecewiseQuadratic1D::unconstrained(
            1.0,
            0.0,
            vec![Pw1dTerm {
                weight: 1.0,
                offset: -1.0,
                kind: TermKind::L1 { lambda: 1.0 },
            }],
        );
        let (t, v) = pw1d_minimize(&phi).unwrap();
        let (tg, vg) = grid_minimize(&phi, -3.0, 3.0, 1e-6);
        assert!((t - tg).abs() < 1e-5, "{t} vs grid {tg}");
        assert!((v - vg).abs() < 1e-5);
        // Analytic: min of t^2/2 + |t-1| is at t = 1 (kink).
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn box_clips_vertex() {
        // phi(t) = 1/2 t^2 - 10 t restricted to [0, 2] via a box term.
        let phi = PiecewiseQuadratic1D {
            c2: 1.0,
            c1: -10.0,
            terms: vec![Pw1dTerm {
                weight: 1.0,
                offset: 0.0,
                kind: TermKind::Box { lo: 0.0, hi: 2.0 },
            }],
            t_lo: f64::NEG_INFINITY,
            t_hi: f64::INFINITY,
        };
        let (t, _) = pw1d_minimize(&phi).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unbounded_is_detected() {
        let phi = PiecewiseQuadratic1D::unconstrained(0.0, -1.0, vec![]);
        assert!(matches!(pw1d_minimize(&phi), Err(Error::Unbounded)));
        let phi = PiecewiseQuadratic1D::unconstrained(0.0, 1.0, vec![]);
        assert!(matches!(pw1d_minimize(&phi), Err(Error::Unbounded)));
    }

    #[test]
    fn flat_problem_prefers_zero() {
        let phi = PiecewiseQuadratic1D {
            c2: 0.0,
            c1: 0.0,
            terms: vec![],
            t_lo: -5.0,
            t_hi: 7.0,
        };
        let (t, v) = pw1d_minimize(&phi).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn subgradient_contains_zero_at_minimizer() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(21);
        for trial in 0..500 {
            let c2 = rng.uniform(0.1, 4.0);
            let c1 = rng.uniform(-3.0, 3.0);
            let mut terms = Vec::new();
            for _ in 0..rng.next_below(3) {
                let weight = rng.uniform(-2.0, 2.0);
                if weight.abs() < 0.05 {
                    continue;
                }
                let offset = rng.uniform(-2.0, 2.0);
                let kind = match rng.next_below(3) {
                    0 => TermKind::L1 {
                        lambda: rng.uniform(0.0, 2.0),
                    },
                    1 => {
                        let lo = rng.uniform(-3.0, 0.0);
                        TermKind::Box {
                            lo,
                            hi: lo + rng.uniform(0.5, 4.0),
                        }
                    }
                    _ => {
                        let lo = rng.uniform(-3.0, -0.2);
                        TermKind::L1Box {
                            lambda: rng.uniform(0.0, 2.0),
                            lo,
                            hi: lo + rng.uniform(0.5, 4.0),
                        }
                    }
                };
                // Keep the current point (t = 0) feasible, mirroring solver use.
                let (_, bl, bh) = kind.parts();
                if offset < bl || offset > bh {
                    continue;
                }
                terms.push(Pw1dTerm {
                    weight,
                    offset,
                    kind,
                });
            }
            let phi = PiecewiseQuadratic1D::unconstrained(c2, c1, terms);
            let (t, v) = pw1d_minimize(&phi).unwrap();
            let (left, right) = subgradient_interval(&phi, t);
            assert!(
                left <= 1e-9 && right >= -1e-9,
                "trial {trial}: subgradient [{left}, {right}] at t = {t}, v = {v}"
            );
        }
    }

    #[test]
    fn random_instances_match_grid() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(22);
        for _ in 0..60 {
            let c2 = rng.uniform(0.2, 3.0);
            let c1 = rng.uniform(-2.0, 2.0);
            let lambda = rng.uniform(0.0, 1.5);
            let phi = PiecewiseQuadratic1D::unconstrained(
                c2,
                c1,
                vec![Pw1dTerm {
                    weight: rng.uniform(0.3, 1.5),
                    offset: rng.uniform(-1.0, 1.0),
                    kind: TermKind::L1 { lambda },
                }],
            );
            let (t, v) = pw1d_minimize(&phi).unwrap();
            let (_, vg) = grid_minimize(&phi, -6.0, 6.0, 1e-5);
            assert!(v <= vg + 1e-9, "solver {v} worse than grid {vg}");
            assert!((phi.eval(t) - v).abs() < 1e-12);
        }
    }
}
