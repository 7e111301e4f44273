//! The composite problem data model:
//! `min F(x) = 1/2 x^T Z^T Z x + q^T x + h(x)  s.t.  A x = b`.

use crate::error::{Error, Result};
use crate::sparse::CscMatrix;

use super::coupling::Coupling;
use super::partition::BlockPartition;
use super::separable::SeparableTerm;

/// Relative floor applied to per-block Lipschitz constants so that an
/// all-zero column cannot produce a degenerate zero curvature.
const LIPSCHITZ_FLOOR_REL: f64 = 1e-12;

/// The smooth quadratic part `f(x) = 1/2 ||Z x||^2 + q^T x`, stored with
/// column access so block derivatives cost `O(nnz(column))`.
#[derive(Clone, Debug)]
pub struct StructuredSmooth {
    z: CscMatrix,
    q: Vec<f64>,
    avg_col_nnz: f64,
}

impl StructuredSmooth {
    pub fn new(z: CscMatrix, q: Vec<f64>) -> Result<Self> {
        if q.len() != z.ncols() {
            return Err(Error::DimensionMismatch {
                what: "linear term q",
                expected: z.ncols(),
                got: q.len(),
            });
        }
        let avg_col_nnz = z.avg_col_nnz();
        Ok(StructuredSmooth { z, q, avg_col_nnz })
    }

    pub fn z(&self) -> &CscMatrix {
        &self.z
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Average column sparsity `p`.
    pub fn avg_col_nnz(&self) -> f64 {
        self.avg_col_nnz
    }

    pub fn dim(&self) -> usize {
        self.z.ncols()
    }

    /// `f(x)` evaluated from scratch.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r = self.z.mul_vec(x)?;
        let quad: f64 = r.iter().map(|v| v * v).sum();
        let lin: f64 = self.q.iter().zip(x).map(|(qi, xi)| qi * xi).sum();
        Ok(0.5 * quad + lin)
    }
}

/// Immutable problem instance shared by all solver runs.
#[derive(Clone, Debug)]
pub struct CompositeProblem {
    smooth: StructuredSmooth,
    nonsmooth: SeparableTerm,
    coupling: Coupling,
    partition: BlockPartition,
    lipschitz: Vec<f64>,
    lip_pow_alpha: Vec<f64>,      // L_i^alpha
    lip_pow_comp: Vec<f64>,       // L_i^(1 - alpha)
    l_max: f64,
    alpha: f64,
    strong_convexity: Option<f64>,
}

impl CompositeProblem {
    /// Assembles and validates a problem. Per-block Lipschitz constants are
    /// derived from the columns of `Z`: the exact squared column norm for
    /// scalar blocks, the squared Frobenius norm of the column block
    /// otherwise (a valid upper bound on the squared spectral norm).
    pub fn new(
        smooth: StructuredSmooth,
        nonsmooth: SeparableTerm,
        coupling: Coupling,
        partition: BlockPartition,
        alpha: f64,
    ) -> Result<Self> {
        let n = partition.total_dim();
        if smooth.dim() != n {
            return Err(Error::DimensionMismatch {
                what: "smooth part",
                expected: n,
                got: smooth.dim(),
            });
        }
        if coupling.dim() != n {
            return Err(Error::DimensionMismatch {
                what: "coupling",
                expected: n,
                got: coupling.dim(),
            });
        }
        if let Some(len) = nonsmooth.explicit_len() {
            if len != n {
                return Err(Error::DimensionMismatch {
                    what: "separable term",
                    expected: n,
                    got: len,
                });
            }
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidProblem(format!("alpha {alpha} outside [0, 1]")));
        }
        if let Coupling::General { a_mat, .. } = &coupling {
            let m = a_mat.nrows();
            if m < 1 || m > n {
                return Err(Error::InvalidProblem(format!(
                    "general coupling needs 1 <= m <= n, got m = {m}"
                )));
            }
        }
        // A single constraint must involve at least two blocks, otherwise no
        // feasible pair direction exists. Only meaningful once N >= 2.
        if partition.num_blocks() >= 2 {
            if let Coupling::Single { a, .. } = &coupling {
                let active = (0..partition.num_blocks())
                    .filter(|&i| partition.block_range(i).any(|c| a[c] != 0.0))
                    .count();
                if active == 1 {
                    return Err(Error::InvalidProblem(
                        "coupling vector touches a single block; no pair direction can move".into(),
                    ));
                }
            }
        }

        let mut lipschitz = Vec::with_capacity(partition.num_blocks());
        for i in 0..partition.num_blocks() {
            let range = partition.block_range(i);
            let l = if range.len() == 1 {
                smooth.z().col_norm_sq(range.start)
            } else {
                smooth.z().col_block_frob_sq(range)
            };
            lipschitz.push(l);
        }
        let raw_max = lipschitz.iter().fold(0.0_f64, |a, &b| a.max(b));
        let floor = if raw_max > 0.0 {
            LIPSCHITZ_FLOOR_REL * raw_max
        } else {
            LIPSCHITZ_FLOOR_REL
        };
        for l in &mut lipschitz {
            if *l < floor {
                *l = floor;
            }
        }
        let l_max = lipschitz.iter().fold(0.0_f64, |a, &b| a.max(b));
        let lip_pow_alpha = lipschitz.iter().map(|l| l.powf(alpha)).collect();
        let lip_pow_comp = lipschitz.iter().map(|l| l.powf(1.0 - alpha)).collect();

        Ok(CompositeProblem {
            smooth,
            nonsmooth,
            coupling,
            partition,
            lipschitz,
            lip_pow_alpha,
            lip_pow_comp,
            l_max,
            alpha,
            strong_convexity: None,
        })
    }

    pub fn with_strong_convexity(mut self, sigma: f64) -> Self {
        self.strong_convexity = Some(sigma);
        self
    }

    /// Optionally tightens multi-coordinate block constants by power
    /// iteration on `Z_I^T Z_I`, keeping the Frobenius bound as a cap. The
    /// estimate converges from below, so a safety factor is applied.
    pub fn tighten_block_lipschitz(&mut self, iterations: usize) {
        for i in 0..self.partition.num_blocks() {
            let range = self.partition.block_range(i);
            if range.len() <= 1 {
                continue;
            }
            let est = block_spectral_estimate(self.smooth.z(), range.clone(), iterations);
            let tightened = (est * 1.05).min(self.lipschitz[i]);
            if tightened > 0.0 {
                self.lipschitz[i] = tightened;
            }
        }
        self.l_max = self.lipschitz.iter().fold(0.0_f64, |a, &b| a.max(b));
        self.lip_pow_alpha = self.lipschitz.iter().map(|l| l.powf(self.alpha)).collect();
        self.lip_pow_comp = self
            .lipschitz
            .iter()
            .map(|l| l.powf(1.0 - self.alpha))
            .collect();
    }

    /// Power-iteration estimate of the full gradient Lipschitz constant
    /// `lambda_max(Z^T Z)` with a 1% safety margin.
    pub fn estimate_full_lipschitz(&self, iterations: usize) -> f64 {
        let z = self.smooth.z();
        let m = z.nrows();
        if m == 0 || z.nnz() == 0 {
            return self.l_max;
        }
        // Iterate on the row side: u <- Z (Z^T u), Rayleigh = ||Z^T u||^2.
        let mut u: Vec<f64> = (0..m).map(|r| 1.0 + 1e-3 * (r as f64 / m as f64)).collect();
        normalize(&mut u);
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let mut w = vec![0.0; z.ncols()];
            for (j, wj) in w.iter_mut().enumerate() {
                *wj = z.col_dot(j, &u);
            }
            lambda = w.iter().map(|v| v * v).sum();
            let mut next = vec![0.0; m];
            for (j, &wj) in w.iter().enumerate() {
                if wj != 0.0 {
                    z.axpy_col(j, wj, &mut next);
                }
            }
            if normalize(&mut next) == 0.0 {
                break;
            }
            u = next;
        }
        (lambda * 1.01).max(self.l_max)
    }

    pub fn smooth(&self) -> &StructuredSmooth {
        &self.smooth
    }

    pub fn z(&self) -> &CscMatrix {
        self.smooth.z()
    }

    pub fn q(&self) -> &[f64] {
        self.smooth.q()
    }

    pub fn nonsmooth(&self) -> &SeparableTerm {
        &self.nonsmooth
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.partition.total_dim()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn lipschitz(&self) -> &[f64] {
        &self.lipschitz
    }

    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }

    /// `L_i^alpha`, the weight of block `i` in the extended norm.
    #[inline]
    pub fn lip_pow_alpha(&self, i: usize) -> f64 {
        self.lip_pow_alpha[i]
    }

    /// `L_i^(1 - alpha)`.
    #[inline]
    pub fn lip_pow_comp(&self, i: usize) -> f64 {
        self.lip_pow_comp[i]
    }

    /// Pair constant `L_ij^alpha = L_i^(1-alpha) + L_j^(1-alpha)`.
    #[inline]
    pub fn pair_constant(&self, i: usize, j: usize) -> f64 {
        self.lip_pow_comp[i] + self.lip_pow_comp[j]
    }

    /// Tuple constant `L_N = sum of L_i over the tuple` (Euclidean model).
    pub fn tuple_constant(&self, tuple: &[usize]) -> f64 {
        tuple.iter().map(|&i| self.lipschitz[i]).sum()
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Power-iteration estimate of `lambda_max(Z_I^T Z_I)` for a column block.
fn block_spectral_estimate(
    z: &CscMatrix,
    cols: std::ops::Range<usize>,
    iterations: usize,
) -> f64 {
    let k = cols.len();
    let mut v: Vec<f64> = (0..k).map(|i| 1.0 + 1e-3 * (i as f64 / k as f64)).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let mut u = vec![0.0; z.nrows()];
        for (p, c) in cols.clone().enumerate() {
            if v[p] != 0.0 {
                z.axpy_col(c, v[p], &mut u);
            }
        }
        lambda = u.iter().map(|x| x * x).sum();
        let mut next: Vec<f64> = cols.clone().map(|c| z.col_dot(c, &u)).collect();
        if normalize(&mut next) == 0.0 {
            break;
        }
        v = next;
    }
    lambda
}

/// Full objective `F(x) = f(x) + h(x)`. Box violations return `+inf`.
pub fn eval_objective(problem: &CompositeProblem, x: &[f64]) -> Result<f64> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "objective argument",
            expected: problem.dim(),
            got: x.len(),
        });
    }
    let h = problem.nonsmooth().eval(x);
    if h == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(problem.smooth().eval(x)? + h)
}

/// Extended norm `||x||_alpha = sqrt(sum_i L_i^alpha ||x_i||^2)`.
pub fn alpha_norm(problem: &CompositeProblem, x: &[f64]) -> f64 {
    let partition = problem.partition();
    let mut acc = 0.0;
    for i in 0..partition.num_blocks() {
        let w = problem.lip_pow_alpha(i);
        let block: f64 = partition.block_range(i).map(|c| x[c] * x[c]).sum();
        acc += w * block;
    }
    acc.sqrt()
}

/// Dual extended norm `||y||_alpha^* = sqrt(sum_i L_i^-alpha ||y_i||^2)`.
pub fn alpha_dual_norm(problem: &CompositeProblem, y: &[f64]) -> f64 {
    let partition = problem.partition();
    let mut acc = 0.0;
    for i in 0..partition.num_blocks() {
        let w = problem.lip_pow_alpha(i);
        let block: f64 = partition.block_range(i).map(|c| y[c] * y[c]).sum();
        acc += block / w;
    }
    acc.sqrt()
}
