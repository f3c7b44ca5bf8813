/// `coeff · t^tpow · (ln t)^logpow · e^{−rate·t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpLogTerm {
    pub coeff: f64,
    pub tpow: i32,
    pub logpow: u32,
    pub rate: f64,
}

impl ExpLogTerm {
    pub fn new(coeff: f64, tpow: i32, logpow: u32, rate: f64) -> Self {
        Self { coeff, tpow, logpow, rate }
    }

    /// `coeff · e^{−rate·t}`.
    pub fn exponential(coeff: f64, rate: f64) -> Self {
        Self::new(coeff, 0, 0, rate)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        self.coeff * t.powi(self.tpow) * t.ln().powi(self.logpow as i32) * (-self.rate * t).exp()
    }

    /// Multiplies by `(ln t / scale)^l`.
    pub fn times_log(&self, l: u32, scale: f64) -> Self {
        Self {
            coeff: self.coeff / scale.powi(l as i32),
            logpow: self.logpow + l,
            ..*self
        }
    }

    /// Multiplies by `t^p`.
    pub fn times_power(&self, p: i32) -> Self {
        Self {
            tpow: self.tpow + p,
            ..*self
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.tpow == other.tpow
            && self.logpow == other.logpow
            && (self.rate == other.rate || (self.rate.to_bits() as i64 - other.rate.to_bits() as i64).abs() <= 1)
    }
}

/// Adds `term` into `out`, merging it with an existing term of the same shape.
pub(crate) fn push_merged(out: &mut Vec<ExpLogTerm>, term: ExpLogTerm) {
    if term.coeff == 0.0 {
        return;
    }
    match out.iter_mut().find(|t| t.same_shape(&term)) {
        Some(t) => t.coeff += term.coeff,
        None => out.push(term),
    }
}

/// Exact `d/dt` of a sum of terms, with like terms merged.
pub fn explog_differentiate(terms: &[ExpLogTerm]) -> Vec<ExpLogTerm> {
    let mut out = Vec::with_capacity(3 * terms.len());
    for t in terms {
        if t.tpow != 0 {
            push_merged(&mut out, ExpLogTerm::new(t.tpow as f64 * t.coeff, t.tpow - 1, t.logpow, t.rate));
        }
        if t.logpow > 0 {
            push_merged(&mut out, ExpLogTerm::new(t.logpow as f64 * t.coeff, t.tpow - 1, t.logpow - 1, t.rate));
        }
        push_merged(&mut out, ExpLogTerm::new(-t.rate * t.coeff, t.tpow, t.logpow, t.rate));
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// Value of a sum of terms.
pub fn explog_eval(terms: &[ExpLogTerm], t: f64) -> f64 {
    crate::numerics::compensated_sum(&terms.iter().map(|x| x.eval(t)).collect::<Vec<_>>())
}
