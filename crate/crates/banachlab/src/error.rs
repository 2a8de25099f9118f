//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("not a group table: {0}")]
    NotAGroup(String),

    #[error("singular value iteration did not converge")]
    NormDidNotConverge,

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    /// A lift cannot run because a measured residual is too large for the
    /// requested accuracy. Names the schedule constant that failed.
    #[error("schedule precondition violated at {constant}: needed < {needed:.6e}, got {got:.6e}")]
    SchedulePrecondition {
        constant: &'static str,
        needed: f64,
        got: f64,
    },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("algebra has no unit")]
    NoUnit,

    #[error("algebra is not commutative")]
    NotCommutative,

    #[error("base diagonal is not central: {0}")]
    NotCentral(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("point {0} is not interior to any cell")]
    UncoveredPoint(usize),

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid constant: {0}")]
    InvalidConstant(String),

    #[error("elementary form mismatch: {0}")]
    ElementaryMismatch(String),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
