//! Block structure of the coordinate space.

use crate::error::{Error, Result};

/// Partition of the flat coordinate space `0..n` into `N` contiguous blocks.
///
/// Blocks are realized as offset/size slices into dense vectors; no selector
/// matrices are ever materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>, // length N + 1, prefix sums of sizes
}

impl BlockPartition {
    /// Builds a partition from block sizes. Sizes must be positive.
    pub fn from_sizes(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidProblem("partition has no blocks".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidProblem("partition has an empty block".into()));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in &sizes {
            acc += s;
            offsets.push(acc);
        }
        Ok(BlockPartition { sizes, offsets })
    }

    /// Scalar partition: every coordinate is its own block (`N = n`).
    pub fn scalar(n: usize) -> Result<Self> {
        Self::from_sizes(vec![1; n])
    }

    /// Partition of `n` coordinates into blocks of `block_size`, the last
    /// block absorbing the remainder.
    pub fn uniform(n: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 || n == 0 {
            return Err(Error::InvalidProblem("uniform partition with zero size".into()));
        }
        let full = n / block_size;
        let rem = n % block_size;
        let mut sizes = vec![block_size; full];
        if rem > 0 {
            sizes.push(rem);
        }
        Self::from_sizes(sizes)
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn block_size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    /// Coordinate range covered by block `i`.
    #[inline]
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Index of the block containing coordinate `c`.
    pub fn block_of_coord(&self, c: usize) -> usize {
        debug_assert!(c < self.total_dim());
        match self.offsets.binary_search(&c) {
            Ok(i) if i < self.sizes.len() => i,
            Ok(i) => i - 1,
            Err(i) => i - 1,
        }
    }

    /// True when every block is a single coordinate.
    pub fn is_scalar(&self) -> bool {
        self.sizes.iter().all(|&s| s == 1)
    }
}
