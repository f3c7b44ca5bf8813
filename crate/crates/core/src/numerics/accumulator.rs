//! Error-compensated summation.
//!
//! [`CompensatedAccumulator`] carries a running sum together with the rounding
//! error lost so far. Two modes are available: Neumaier's improved Kahan
//! scheme (the default) and a renormalised double-word sum where the pair
//! `(sum, compensation)` is kept as a non-overlapping double-double.
//!
//! Partial accumulators can be merged, which is how chunked parallel reductions
//! combine their pieces; merging in a fixed order keeps results bit-reproducible.

use num_complex::Complex64;

use super::NumericsError;

/// Accumulation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AccumulatorMode {
    /// Neumaier (Kahan–Babuška) compensation.
    #[default]
    Neumaier,
    /// Double-word accumulation with renormalisation after every add.
    DoubleWord,
}

/// Error-free transformation `a + b = s + e`.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a + b = s + e` assuming `|a| >= |b|` (or `a == 0`).
#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Running compensated sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompensatedAccumulator {
    sum: f64,
    compensation: f64,
    count: u64,
    mode: AccumulatorMode,
}

impl CompensatedAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_mode(mode: AccumulatorMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn mode(&self) -> AccumulatorMode {
        self.mode
    }

    /// Adds a finite term. Non-finite terms are rejected and leave the
    /// accumulator untouched.
    pub fn add(&mut self, term: f64) -> Result<(), NumericsError> {
        if !term.is_finite() {
            return Err(NumericsError::NonFiniteTerm(term));
        }
        self.add_finite(term);
        Ok(())
    }

    /// Adds a term the caller has already checked to be finite.
    #[inline]
    pub fn add_finite(&mut self, term: f64) {
        self.count += 1;
        match self.mode {
            AccumulatorMode::Neumaier => {
                let t = self.sum + term;
                if self.sum.abs() >= term.abs() {
                    self.compensation += (self.sum - t) + term;
                } else {
                    self.compensation += (term - t) + self.sum;
                }
                self.sum = t;
            }
            AccumulatorMode::DoubleWord => {
                let (s, e) = two_sum(self.sum, term);
                let (hi, lo) = fast_two_sum(s, e + self.compensation);
                self.sum = hi;
                self.compensation = lo;
            }
        }
    }

    /// Folds another partial sum into this one. The other accumulator's
    /// compensation is carried over, so chunked sums lose nothing at the seams.
    pub fn merge(&mut self, other: &CompensatedAccumulator) {
        let count = self.count + other.count;
        self.add_finite(other.sum);
        self.add_finite(other.compensation);
        self.count = count;
    }

    /// Best estimate of the exact sum.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// The uncorrected running sum.
    pub fn raw_sum(&self) -> f64 {
        self.sum
    }

    pub fn compensation(&self) -> f64 {
        self.compensation
    }

    /// Number of `add` calls performed (merges count the other side's adds).
    pub fn count(&self) -> u64 {
        self.count
    }
}

impl FromIterator<f64> for CompensatedAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add_finite(x);
        }
        acc
    }
}

/// Compensated complex sum: one real accumulator per component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexAccumulator {
    re: CompensatedAccumulator,
    im: CompensatedAccumulator,
}

impl ComplexAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Complex64) -> Result<(), NumericsError> {
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(NumericsError::NonFiniteTerm(if term.re.is_finite() {
                term.im
            } else {
                term.re
            }));
        }
        self.re.add_finite(term.re);
        self.im.add_finite(term.im);
        Ok(())
    }

    pub fn merge(&mut self, other: &ComplexAccumulator) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn count(&self) -> u64 {
        self.re.count()
    }
}

/// Compensated sum of a slice, in order.
pub fn compensated_sum(terms: &[f64]) -> f64 {
    terms.iter().copied().collect::<CompensatedAccumulator>().value()
}
