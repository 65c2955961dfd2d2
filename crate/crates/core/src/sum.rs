//! Compensated accumulation and deterministic block-parallel sums.

use rayon::prelude::*;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for Neumaier {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = Neumaier::new();
    acc.extend(iter);
    acc.value()
}

/// Block length of [`block_sum`]. Part of the reduction contract: changing it
/// changes the low bits of every block-summed series.
pub const BLOCK: usize = 4096;

/// Sums `term(j)` for `j` in `start..end`.
///
/// The range is cut into blocks of [`BLOCK`] indices aligned to multiples of
/// `BLOCK`; each block is summed left to right with Neumaier compensation,
/// possibly on different threads, and the block sums are then combined left
/// to right. The result depends only on the range, never on the thread count.
pub fn block_sum<F>(start: usize, end: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if end <= start {
        return 0.0;
    }
    let first = start / BLOCK;
    let last = (end - 1) / BLOCK;
    let partials: Vec<f64> = (first..=last)
        .into_par_iter()
        .map(|b| {
            let lo = (b * BLOCK).max(start);
            let hi = ((b + 1) * BLOCK).min(end);
            neumaier_sum((lo..hi).map(&term))
        })
        .collect();
    neumaier_sum(partials)
}
