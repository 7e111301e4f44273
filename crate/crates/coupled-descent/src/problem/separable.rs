//! Coordinatewise separable nonsmooth terms.

use crate::error::{Error, Result};

/// Per-coordinate shape of the nonsmooth term `h_i`.
///
/// Every variant is convex and closed with a piecewise-quadratic-friendly
/// structure: at most one kink (at zero) and at most one interval domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TermKind {
    /// `h_i = 0`.
    Zero,
    /// `h_i(x) = lambda * |x|`.
    L1 { lambda: f64 },
    /// Indicator of `[lo, hi]`.
    Box { lo: f64, hi: f64 },
    /// `lambda * |x|` plus the indicator of `[lo, hi]`.
    L1Box { lambda: f64, lo: f64, hi: f64 },
}

impl TermKind {
    fn validate(&self) -> Result<()> {
        match *self {
            TermKind::Zero => Ok(()),
            TermKind::L1 { lambda } => {
                if lambda < 0.0 || !lambda.is_finite() {
                    Err(Error::InvalidProblem(format!("l1 weight {lambda} must be >= 0")))
                } else {
                    Ok(())
                }
            }
            TermKind::Box { lo, hi } | TermKind::L1Box { lo, hi, .. } => {
                if lo > hi {
                    return Err(Error::InvalidProblem(format!("box [{lo}, {hi}] is empty")));
                }
                if let TermKind::L1Box { lambda, .. } = *self {
                    if lambda < 0.0 || !lambda.is_finite() {
                        return Err(Error::InvalidProblem(format!(
                            "l1 weight {lambda} must be >= 0"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// An `L1Box` with zero weight is exactly a box; normalizing at
    /// construction keeps the two configurations bit-identical downstream.
    fn normalize(self) -> TermKind {
        match self {
            TermKind::L1 { lambda: 0.0 } => TermKind::Zero,
            TermKind::L1Box { lambda: 0.0, lo, hi } => TermKind::Box { lo, hi },
            other => other,
        }
    }

    /// Evaluates `h_i(x)`; box violations give `+inf`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TermKind::Zero => 0.0,
            TermKind::L1 { lambda } => lambda * x.abs(),
            TermKind::Box { lo, hi } => {
                if x < lo || x > hi {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            TermKind::L1Box { lambda, lo, hi } => {
                if x < lo || x > hi {
                    f64::INFINITY
                } else {
                    lambda * x.abs()
                }
            }
        }
    }

    /// `(lambda, lo, hi)` view: weight of the kink at zero and domain bounds.
    #[inline]
    pub fn parts(&self) -> (f64, f64, f64) {
        match *self {
            TermKind::Zero => (0.0, f64::NEG_INFINITY, f64::INFINITY),
            TermKind::L1 { lambda } => (lambda, f64::NEG_INFINITY, f64::INFINITY),
            TermKind::Box { lo, hi } => (0.0, lo, hi),
            TermKind::L1Box { lambda, lo, hi } => (lambda, lo, hi),
        }
    }

    /// Clamps `x` into the domain (identity for unbounded kinds).
    #[inline]
    pub fn clamp(&self, x: f64) -> f64 {
        let (_, lo, hi) = self.parts();
        x.clamp(lo, hi)
    }
}

#[derive(Clone, Debug)]
enum Kinds {
    Uniform(TermKind),
    PerCoord(Vec<TermKind>),
}

/// The separable nonsmooth part `h(x) = sum_i h_i(x_i)`.
#[derive(Clone, Debug)]
pub struct SeparableTerm {
    kinds: Kinds,
}

impl SeparableTerm {
    pub fn zero() -> Self {
        SeparableTerm {
            kinds: Kinds::Uniform(TermKind::Zero),
        }
    }

    pub fn l1(lambda: f64) -> Result<Self> {
        Self::uniform(TermKind::L1 { lambda })
    }

    pub fn boxed(lo: f64, hi: f64) -> Result<Self> {
        Self::uniform(TermKind::Box { lo, hi })
    }

    pub fn l1_box(lambda: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::uniform(TermKind::L1Box { lambda, lo, hi })
    }

    /// Same kind applied to every coordinate.
    pub fn uniform(kind: TermKind) -> Result<Self> {
        kind.validate()?;
        Ok(SeparableTerm {
            kinds: Kinds::Uniform(kind.normalize()),
        })
    }

    /// One kind per coordinate.
    pub fn per_coordinate(kinds: Vec<TermKind>) -> Result<Self> {
        for k in &kinds {
            k.validate()?;
        }
        Ok(SeparableTerm {
            kinds: Kinds::PerCoord(kinds.into_iter().map(TermKind::normalize).collect()),
        })
    }

    /// Kind applied to coordinate `i`.
    #[inline]
    pub fn kind(&self, i: usize) -> TermKind {
        match &self.kinds {
            Kinds::Uniform(k) => *k,
            Kinds::PerCoord(v) => v[i],
        }
    }

    /// Expected coordinate count, if per-coordinate.
    pub fn explicit_len(&self) -> Option<usize> {
        match &self.kinds {
            Kinds::Uniform(_) => None,
            Kinds::PerCoord(v) => Some(v.len()),
        }
    }

    /// `h(x)`; `+inf` as soon as any coordinate violates its box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let v = self.kind(i).eval(xi);
            if v == f64::INFINITY {
                return f64::INFINITY;
            }
            total += v;
        }
        total
    }

    /// True when every coordinate is the indicator of `[0, +inf)`.
    pub fn is_nonnegativity(&self, n: usize) -> bool {
        (0..n).all(|i| matches!(self.kind(i), TermKind::Box { lo, hi } if lo == 0.0 && hi == f64::INFINITY))
    }
}
