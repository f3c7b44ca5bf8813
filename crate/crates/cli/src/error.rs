use thiserror::Error;
use zsk_core::gzeta::GzetaError;
use zsk_core::lattice::LatticeError;
use zsk_core::numerics::NumericsError;
use zsk_core::quadrature::QuadratureError;

use crate::expr::{EvalError, ParseError};

/// Failure of a command, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("tolerance not met: {0}")]
    Tolerance(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Config(format!("expression: {e}"))
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::NonFiniteTerm(_)
            | NumericsError::ExcludedArgument(_)
            | NumericsError::GammaDomain(_)
            | NumericsError::GammaOverflow(_) => CliError::Domain(e.to_string()),
            NumericsError::NonConvergence { .. } => CliError::Tolerance(e.to_string()),
            NumericsError::InvalidTolerance(_) | NumericsError::InvalidParameter(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        match e {
            QuadratureError::Evaluation(inner) => inner.into(),
            QuadratureError::DenominatorFloor { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Numerics(inner) => inner.into(),
            LatticeError::InvalidParameter(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<GzetaError> for CliError {
    fn from(e: GzetaError) -> Self {
        match e {
            GzetaError::Numerics(inner) => inner.into(),
            GzetaError::NormalizerFloor(_) => CliError::Domain(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
