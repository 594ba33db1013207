use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular (rank {rank} < {dim})")]
    Singular { rank: usize, dim: usize },
    #[error("map is not surjective (rank {rank} < {target})")]
    NotSurjective { rank: usize, target: usize },
    #[error("class is zero: target lies in the subspace")]
    ZeroClass,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree {degree} is not divisible by truncation level {k}")]
    NotDivisible { degree: u32, k: u32 },
    #[error("norm is not monomial-diagonal")]
    NotMonomialDiagonal,
    #[error("total Monge-Ampere mass mismatch: {0} vs {1}")]
    MassMismatch(String, String),
}

pub type Result<T> = std::result::Result<T, Error>;
