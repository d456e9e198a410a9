//! Mean estimators: the empirical mean and median-of-means (MoM).
//!
//! MoM splits the sample into `K` contiguous blocks, averages each block and
//! returns the median of the block means. When `K` does not divide `N` the
//! first `N mod K` blocks get one extra point; no shuffling is performed.

use std::ops::{Deref, Range};

use crate::error::{Error, Result};

/// A non-empty vector of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Sample {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty("sample must contain at least one value"));
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// `(1/N) Σ x_i`.
pub fn empirical_mean(values: &[f64]) -> Result<f64> {
    check_values(values)?;
    Ok(mean_unchecked(values))
}

#[inline]
fn mean_unchecked(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `K` balanced contiguous blocks over `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    k: usize,
}

impl BlockPartition {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::BlockCount { k, n });
        }
        Ok(Self { n, k })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn blocks(&self) -> usize {
        self.k
    }

    /// Half-open index range of block `i` (0-based).
    pub fn range(&self, i: usize) -> Range<usize> {
        debug_assert!(i < self.k);
        let base = self.n / self.k;
        let extra = self.n % self.k;
        let start = i * base + i.min(extra);
        let len = base + usize::from(i < extra);
        start..start + len
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.k).map(move |i| self.range(i))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.ranges().map(|r| r.len()).collect()
    }

    /// Block means of `values`, which must have length `N`.
    pub fn block_means(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: values.len(),
            });
        }
        Ok(self.ranges().map(|r| mean_unchecked(&values[r])).collect())
    }
}

pub fn partition_blocks(n: usize, k: usize) -> Result<BlockPartition> {
    BlockPartition::new(n, k)
}

/// Median with the even-length midpoint rule. Reorders `values`.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    let len = values.len();
    debug_assert!(len > 0);
    let mid = len / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lower + (upper - lower) / 2.0
    }
}

/// Median of the `K` block means.
pub fn median_of_means(values: &[f64], k: usize) -> Result<f64> {
    check_values(values)?;
    let partition = BlockPartition::new(values.len(), k)?;
    mom_with_partition(values, &partition)
}

/// MoM on a precomputed partition; lets callers share one partition across
/// many loss sequences.
pub fn mom_with_partition(values: &[f64], partition: &BlockPartition) -> Result<f64> {
    let mut means = partition.block_means(values)?;
    Ok(median_in_place(&mut means))
}
