//! Crate-wide error type and its process exit codes.

use crate::betanum::BetaError;
use crate::classify::ClassifyError;
use crate::gibbs::GibbsError;
use crate::matcore::MatError;
use crate::measure::MeasureError;
use crate::prodsim::ProdError;

/// Exit code for invalid input or unmet preconditions.
pub const EXIT_PRECONDITION: i32 = 2;
/// Exit code for failed internal consistency checks.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Prod(#[from] ProdError),
    #[error(transparent)]
    Beta(#[from] BetaError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Gibbs(#[from] GibbsError),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error reports a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Classify(e) => matches!(
                e,
                ClassifyError::InfeasibleAlpha { .. } | ClassifyError::TransformedFamilyViolates(_)
            ),
            Error::Beta(e) => matches!(
                e,
                BetaError::UnexpectedCarrySet(_)
                    | BetaError::DisplayMismatch(_)
                    | BetaError::TilingViolation(_)
                    | BetaError::CommutationFailure(_)
            ),
            Error::Measure(e) => e.is_internal(),
            Error::Gibbs(e) => e.is_internal(),
            _ => false,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_internal() {
            EXIT_INTERNAL
        } else {
            EXIT_PRECONDITION
        }
    }
}
