//! svmlight / LIBSVM sparse dataset parser.
//!
//! One example per line: `<label> <index>:<value> ...` with 1-based,
//! strictly increasing indices. Examples become matrix columns. Trailing
//! `#` comments are stripped; empty lines are skipped.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CscMatrix;

/// A parsed two-class dataset: examples as columns of the instance matrix,
/// labels in `{-1, +1}`.
#[derive(Clone, Debug)]
pub struct SvmInstance {
    z: CscMatrix,
    labels: Vec<f64>,
    label_warnings: usize,
}

impl SvmInstance {
    pub fn new(z: CscMatrix, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != z.ncols() {
            return Err(Error::DimensionMismatch {
                what: "label vector",
                expected: z.ncols(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|&l| l != 1.0 && l != -1.0) {
            return Err(Error::InvalidProblem("labels must be +1 or -1".into()));
        }
        Ok(SvmInstance {
            z,
            labels,
            label_warnings: 0,
        })
    }

    /// Instance matrix, features x examples.
    pub fn z(&self) -> &CscMatrix {
        &self.z
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn num_examples(&self) -> usize {
        self.z.ncols()
    }

    pub fn num_features(&self) -> usize {
        self.z.nrows()
    }

    /// Average column sparsity `p`.
    pub fn avg_col_nnz(&self) -> f64 {
        self.z.avg_col_nnz()
    }

    /// How many labels were not exactly +1/-1 and got sign-normalized.
    pub fn label_warnings(&self) -> usize {
        self.label_warnings
    }
}

/// Parses a dataset file.
pub fn parse_sparse_dataset(path: &Path) -> Result<SvmInstance> {
    let file = File::open(path)?;
    parse_sparse_reader(BufReader::new(file))
}

/// Parses a dataset from any reader (streaming, line by line).
pub fn parse_sparse_reader<R: Read>(reader: BufReader<R>) -> Result<SvmInstance> {
    let mut labels: Vec<f64> = Vec::new();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_feature = 0usize;
    let mut warnings = 0usize;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(Error::Io)?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue; // blank line
        };
        let raw_label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("label `{label_tok}` is not a number"),
        })?;
        let label = if raw_label > 0.0 { 1.0 } else { -1.0 };
        if raw_label != 1.0 && raw_label != -1.0 {
            warnings += 1;
        }
        let example = labels.len();
        labels.push(label);

        let mut prev_index = 0usize;
        for tok in tokens {
            let Some((idx_str, val_str)) = tok.split_once(':') else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("feature `{tok}` is missing an index:value colon"),
                });
            };
            let index: usize = idx_str.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("feature index `{idx_str}` is not an integer"),
            })?;
            if index == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "feature indices are 1-based".into(),
                });
            }
            if index <= prev_index {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "feature index {index} does not increase (previous {prev_index})"
                    ),
                });
            }
            let value: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("feature value `{val_str}` is not a number"),
            })?;
            prev_index = index;
            max_feature = max_feature.max(index);
            if value != 0.0 {
                triplets.push((index - 1, example, value));
            }
        }
    }

    let z = CscMatrix::from_triplets(max_feature, labels.len(), &triplets)?;
    let mut instance = SvmInstance::new(z, labels)?;
    instance.label_warnings = warnings;
    Ok(instance)
}
