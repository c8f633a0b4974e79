//! Quadratic Pisot bases: exact field arithmetic, the carry set and the
//! numeration matrices.

mod field;
mod system;

pub use field::{BetaNumber, QuadraticBase};
pub use system::{
    build_digit_matrices, build_partition_maps, build_star_and_reduced, digit_matrix_display, reachable_set,
    AffineMap, NumerationSystem, StarFamilies, REACHABLE_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BetaError {
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("numbers belong to different bases")]
    BaseMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as u + v*beta")]
    Parse(String),
    #[error("digit count {0} does not exceed beta")]
    InvalidDigitCount(usize),
    #[error("carry set exceeds {0} elements")]
    CapExceeded(usize),
    #[error("unexpected carry set {{{0}}}")]
    UnexpectedCarrySet(String),
    #[error("digit matrix {0} disagrees with its closed form")]
    DisplayMismatch(usize),
    #[error("partition maps do not tile [0, 1]: {0}")]
    TilingViolation(String),
    #[error("commutation relation fails for letter {0}")]
    CommutationFailure(usize),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
}
