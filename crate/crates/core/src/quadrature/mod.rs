//! Series representations of `∫₀¹ f` over logarithmic node sequences.
//!
//! Every scheme has the same skeleton: for group `n` the terms with integers
//! `Mn − k`, `k = 1..M−1`, are paired with the term at `Mn`, and the groups are
//! summed in order. The pairing is what makes the series converge; the groups
//! are the truncation unit throughout.

use thiserror::Error;

use crate::exec::ExecPolicy;
use crate::numerics::{NumericsError, ToleranceConfig};

mod function;
mod nodes;
mod schemes;
mod stream;
mod tail;

pub use function::{ModulusKind, ModulusOfContinuity, PeriodicFunction, RealFn, SmoothnessHint};
pub use nodes::{frac, log_frac, log_frac_real, reciprocal_frac};
pub use schemes::{
    cf_denominator, integral_cf_nodes, integral_derivative_form, integral_lattice_nodes, integral_logM,
    integral_rational_base, integral_transformed, integrate, lattice_denominator, NodeScheme,
};
pub use stream::{node_stream, NodeRow};
pub use tail::{estimate_constants, tail_bound};
pub(crate) use schemes::derivative_coefficients;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid scheme: {0}")]
    InvalidScheme(&'static str),
    #[error("invalid modulus: {0}")]
    InvalidModulus(&'static str),
    #[error("function declares no modulus of continuity")]
    ModulusAbsent,
    #[error("{groups} groups exceed max_terms = {max_terms}")]
    TooManyGroups { groups: u64, max_terms: u64 },
    #[error("denominator below floor {floor} at node {node}")]
    DenominatorFloor { node: f64, floor: f64 },
    #[error("chi is not a left inverse of phi at y = {0}")]
    InverseMismatch(f64),
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] NumericsError),
}

/// Layout and guard settings shared by the integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub policy: ExecPolicy,
    pub tol: ToleranceConfig,
    /// Smallest admissible `|G|` in the weighted schemes.
    pub denominator_floor: f64,
    /// Accuracy of the inner series `G` in the continued-fraction scheme.
    pub inner_tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            policy: ExecPolicy::default(),
            tol: ToleranceConfig::default(),
            denominator_floor: 1e-12,
            inner_tol: 1e-12,
        }
    }
}

impl QuadratureOptions {
    pub fn with_policy(mut self, policy: ExecPolicy) -> Self {
        self.policy = policy;
        self
    }

    fn check_groups(&self, groups: u64) -> Result<(), QuadratureError> {
        if groups < 1 {
            return Err(QuadratureError::InvalidScheme("groups must be at least 1"));
        }
        if groups > self.tol.max_terms() {
            return Err(QuadratureError::TooManyGroups {
                groups,
                max_terms: self.tol.max_terms(),
            });
        }
        Ok(())
    }
}

/// Outcome of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    /// Estimate of `∫₀¹ f`, equal to `raw_series_sum / normalizer`.
    pub value: f64,
    pub raw_series_sum: f64,
    pub normalizer: f64,
    pub groups_used: u64,
    /// Bound on `|value − ∫₀¹ f|` from the omitted groups, in value units.
    pub tail_estimate: f64,
    /// Set when the tail rests on sampled constants or a heuristic sum.
    pub tail_heuristic: bool,
}

impl QuadratureResult {
    pub(crate) fn new(raw: f64, normalizer: f64, groups: u64, tail_raw: f64, heuristic: bool) -> Self {
        Self {
            value: raw / normalizer,
            raw_series_sum: raw,
            normalizer,
            groups_used: groups,
            tail_estimate: (tail_raw / normalizer).abs(),
            tail_heuristic: heuristic,
        }
    }
}
