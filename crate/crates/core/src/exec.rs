//! Chunked, order-fixed reduction over group indices.
//!
//! A range of groups is cut into chunks of `chunk` consecutive indices. Every
//! chunk is summed sequentially into its own compensated partial and the
//! partials are merged in ascending chunk order. The thread count changes only
//! who computes a chunk, never the arithmetic, so the sequential path and any
//! parallel run with the same chunk size produce identical bits.

use num_complex::Complex64;

use crate::numerics::{CompensatedAccumulator, ComplexAccumulator, NumericsError};

pub const DEFAULT_CHUNK: u64 = 4096;

/// How a reduction is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecPolicy {
    threads: Option<usize>,
    chunk: u64,
    parallel: bool,
}

impl ExecPolicy {
    pub fn sequential() -> Self {
        Self {
            threads: None,
            chunk: DEFAULT_CHUNK,
            parallel: false,
        }
    }

    /// Parallel over the global rayon pool, or over a private pool of
    /// `threads` workers. Without the `parallel` feature this runs sequentially.
    pub fn parallel(threads: Option<usize>) -> Self {
        Self {
            threads: threads.filter(|&t| t > 0),
            chunk: DEFAULT_CHUNK,
            parallel: true,
        }
    }

    pub fn with_chunk(mut self, chunk: u64) -> Self {
        self.chunk = chunk.max(1);
        self
    }

    pub fn chunk(&self) -> u64 {
        self.chunk
    }

    pub fn threads(&self) -> Option<usize> {
        self.threads
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel && cfg!(feature = "parallel")
    }

    /// Sums `term(n)` for `n` in `first..=last` (empty when `last < first`).
    pub fn reduce<P, F>(&self, first: u64, last: u64, term: F) -> Result<P, NumericsError>
    where
        P: Partial,
        F: Fn(u64) -> P::Item + Sync,
    {
        if last < first {
            return Ok(P::default());
        }
        let span = last - first + 1;
        let chunks = span.div_ceil(self.chunk);
        let chunk_sum = |c: u64| -> Result<P, NumericsError> {
            let lo = first + c * self.chunk;
            let hi = (lo + self.chunk - 1).min(last);
            let mut part = P::default();
            for n in lo..=hi {
                part.push(term(n))?;
            }
            Ok(part)
        };
        let partials = self.map_ordered(chunks, chunk_sum);
        let mut total = P::default();
        for part in partials {
            total.merge(&part?);
        }
        Ok(total)
    }

    /// `(0..count).map(f)` with results in index order; evaluated in parallel
    /// when the policy allows.
    pub fn map_ordered<R, F>(&self, count: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.parallel {
            use rayon::prelude::*;
            let run = || (0..count).into_par_iter().map(&f).collect::<Vec<R>>();
            return match self.threads {
                Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                    Ok(pool) => pool.install(run),
                    Err(_) => run(),
                },
                None => run(),
            };
        }
        (0..count).map(f).collect()
    }
}

impl Default for ExecPolicy {
    fn default() -> Self {
        Self::parallel(None)
    }
}

/// A mergeable partial sum.
pub trait Partial: Default + Send {
    type Item;
    fn push(&mut self, item: Self::Item) -> Result<(), NumericsError>;
    fn merge(&mut self, other: &Self);
}

impl Partial for CompensatedAccumulator {
    type Item = f64;
    fn push(&mut self, item: f64) -> Result<(), NumericsError> {
        self.add(item)
    }
    fn merge(&mut self, other: &Self) {
        CompensatedAccumulator::merge(self, other)
    }
}

impl Partial for ComplexAccumulator {
    type Item = Complex64;
    fn push(&mut self, item: Complex64) -> Result<(), NumericsError> {
        self.add(item)
    }
    fn merge(&mut self, other: &Self) {
        ComplexAccumulator::merge(self, other)
    }
}

/// Two series carried side by side, each compensated on its own.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairAccumulator {
    pub first: CompensatedAccumulator,
    pub second: CompensatedAccumulator,
}

impl Partial for PairAccumulator {
    type Item = (f64, f64);
    fn push(&mut self, item: (f64, f64)) -> Result<(), NumericsError> {
        self.first.add(item.0)?;
        self.second.add(item.1)
    }
    fn merge(&mut self, other: &Self) {
        self.first.merge(&other.first);
        self.second.merge(&other.second);
    }
}
