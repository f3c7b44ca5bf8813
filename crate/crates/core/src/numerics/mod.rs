//! Floating-point building blocks: compensated accumulation, tolerances and
//! the reference special functions the other modules are checked against.

use num_complex::Complex64;
use thiserror::Error;

mod accumulator;
mod gamma;
mod theta;
mod tolerance;
mod trapezoid;
mod zeta;

pub use accumulator::{compensated_sum, two_sum, AccumulatorMode, CompensatedAccumulator, ComplexAccumulator};
pub use gamma::{factorial, gamma_ref, GAMMA_MAX_ARG};
pub use theta::theta_ab;
pub use tolerance::ToleranceConfig;
pub use trapezoid::{circle_trapezoid_mean, periodic_trapezoid_integral};
pub use zeta::{grouped_difference_sum, grouped_difference_tail, zeta_real, zeta_ref};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite term {0} added to an accumulator")]
    NonFiniteTerm(f64),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("argument {0} is outside the supported domain")]
    ExcludedArgument(Complex64),
    #[error("needs {needed} terms but max_terms is {max_terms}")]
    NonConvergence { needed: u64, max_terms: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("gamma is undefined at {0}")]
    GammaDomain(f64),
    #[error("gamma overflows at {0}")]
    GammaOverflow(f64),
}
