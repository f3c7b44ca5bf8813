use super::NumericsError;

/// Stopping rules shared by the iterative evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    abs_tol: f64,
    rel_tol: f64,
    max_terms: u64,
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: u64) -> Result<Self, NumericsError> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(NumericsError::InvalidTolerance("abs_tol must be positive"));
        }
        if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
            return Err(NumericsError::InvalidTolerance("rel_tol must be non-negative"));
        }
        if max_terms < 1 {
            return Err(NumericsError::InvalidTolerance("max_terms must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_terms,
        })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }

    pub fn with_max_terms(mut self, max_terms: u64) -> Result<Self, NumericsError> {
        if max_terms < 1 {
            return Err(NumericsError::InvalidTolerance("max_terms must be at least 1"));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    /// `true` once `err` is below `abs_tol + rel_tol * |scale|`.
    pub fn accepts(&self, err: f64, scale: f64) -> bool {
        err <= self.abs_tol + self.rel_tol * scale.abs()
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_terms: 100_000_000,
        }
    }
}
