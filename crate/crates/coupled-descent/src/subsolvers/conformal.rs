//! Conformal realization of null-space vectors of a single constraint row.
//!
//! A vector `d` with `a^T d = 0` decomposes into elementary null-space
//! vectors that are sign-consistent with `d` and supported on at most two
//! coordinates. Coordinates where `a` vanishes form singleton pieces; the
//! rest are paired greedily, each pair zeroing at least one endpoint's
//! remaining flow, which bounds the piece count by `|supp(d)| - 1`.

use crate::error::{Error, Result};
use crate::problem::Coupling;

/// A sparse elementary piece: `(coordinate, value)` entries.
pub type SparsePiece = Vec<(usize, f64)>;

/// Conformal decomposition `d = d^1 + ... + d^s` into elementary null-space
/// vectors.
#[derive(Clone, Debug)]
pub struct ElementaryDecomposition {
    pieces: Vec<SparsePiece>,
}

impl ElementaryDecomposition {
    pub fn pieces(&self) -> &[SparsePiece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Reassembles the decomposed vector.
    pub fn sum(&self, n: usize) -> Vec<f64> {
        let mut d = vec![0.0; n];
        for piece in &self.pieces {
            for &(c, v) in piece {
                d[c] += v;
            }
        }
        d
    }
}

/// Decomposes `d` (with `a^T d = 0`) into conformal elementary pieces.
pub fn conformal_realization(d: &[f64], coupling: &Coupling) -> Result<ElementaryDecomposition> {
    let a = match coupling {
        Coupling::Single { a, .. } => a,
        Coupling::General { .. } => {
            return Err(Error::UnsupportedConfiguration(
                "conformal realization is implemented for a single constraint row".into(),
            ))
        }
    };
    if a.len() != d.len() {
        return Err(Error::DimensionMismatch {
            what: "conformal realization",
            expected: a.len(),
            got: d.len(),
        });
    }
    let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d_norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dot: f64 = a.iter().zip(d).map(|(ai, di)| ai * di).sum();
    if dot.abs() > 1e-10 * (1.0 + a_norm * d_norm) {
        return Err(Error::NotInNullSpace { residual: dot.abs() });
    }

    let mut pieces: Vec<SparsePiece> = Vec::new();
    // Coordinates outside the constraint: singleton elementary vectors.
    let mut plus: Vec<(usize, f64)> = Vec::new(); // (coord, flow a_c d_c > 0)
    let mut minus: Vec<(usize, f64)> = Vec::new(); // (coord, -a_c d_c > 0)
    for (c, (&ac, &dc)) in a.iter().zip(d).enumerate() {
        if dc == 0.0 {
            continue;
        }
        let flow = ac * dc;
        if ac == 0.0 {
            pieces.push(vec![(c, dc)]);
        } else if flow > 0.0 {
            plus.push((c, flow));
        } else {
            minus.push((c, -flow));
        }
    }

    // Pair positive against negative flow; each emitted piece zeroes at
    // least one side, so at most |P| + |M| - 1 pieces are produced.
    let (mut pi, mut mi) = (0, 0);
    while pi < plus.len() && mi < minus.len() {
        let (cp, fp) = plus[pi];
        let (cm, fm) = minus[mi];
        let alpha = fp.min(fm);
        pieces.push(vec![(cp, alpha / a[cp]), (cm, -alpha / a[cm])]);
        plus[pi].1 -= alpha;
        minus[mi].1 -= alpha;
        if plus[pi].1 <= 0.0 {
            pi += 1;
        }
        if minus[mi].1 <= 0.0 {
            mi += 1;
        }
    }
    // Any single-sided flow left over is bounded by the null-space
    // tolerance on a^T d and is dropped.

    let decomposition = ElementaryDecomposition { pieces };
    #[cfg(debug_assertions)]
    if let Err(msg) = check_decomposition(&decomposition, d, coupling) {
        panic!("conformal realization violated an invariant: {msg}");
    }
    Ok(decomposition)
}

/// Full invariant check of a decomposition against its source vector.
/// Used by tests and debug assertions; returns a description on failure.
pub fn check_decomposition(
    decomposition: &ElementaryDecomposition,
    d: &[f64],
    coupling: &Coupling,
) -> std::result::Result<(), String> {
    let a = match coupling {
        Coupling::Single { a, .. } => a,
        Coupling::General { .. } => return Err("general coupling not supported".into()),
    };
    let support: usize = d.iter().filter(|v| **v != 0.0).count();
    let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (k, piece) in decomposition.pieces().iter().enumerate() {
        if piece.is_empty() || piece.len() > 2 {
            return Err(format!("piece {k} has {} nonzeros", piece.len()));
        }
        let mut dot = 0.0;
        let mut norm = 0.0;
        for &(c, v) in piece {
            if v == 0.0 {
                return Err(format!("piece {k} stores an explicit zero at {c}"));
            }
            if d[c] == 0.0 {
                return Err(format!("piece {k} leaves supp(d) at coordinate {c}"));
            }
            if v * d[c] < 0.0 {
                return Err(format!("piece {k} flips sign at coordinate {c}"));
            }
            dot += a[c] * v;
            norm += v * v;
        }
        if dot.abs() > 1e-10 * (1.0 + a_norm * norm.sqrt()) {
            return Err(format!("piece {k} leaves the null space: a^T d^k = {dot:e}"));
        }
        // Elementary: singletons live where a vanishes, pairs where it does not.
        if piece.len() == 1 && a[piece[0].0] != 0.0 {
            return Err(format!("piece {k} is a singleton on a coupled coordinate"));
        }
        if piece.len() == 2 && (a[piece[0].0] == 0.0 || a[piece[1].0] == 0.0) {
            return Err(format!("piece {k} pairs an uncoupled coordinate"));
        }
    }
    let sum = decomposition.sum(d.len());
    let d_norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (c, (got, want)) in sum.iter().zip(d).enumerate() {
        if (got - want).abs() > 1e-10 * (1.0 + d_norm) {
            return Err(format!("sum mismatch at {c}: {got} vs {want}"));
        }
    }
    let s = decomposition.len();
    let bound = if support >= 2 { support - 1 } else { support };
    if s > bound {
        return Err(format!("{s} pieces exceed the bound {bound} for support {support}"));
    }
    Ok(())
}
