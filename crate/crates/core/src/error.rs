use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("points share a coordinate value on axis {axis}")]
    SharedCoordinate { axis: usize },

    #[error("empty point set")]
    EmptyInput,

    #[error("too many points ({count}); at most 64 are supported")]
    TooManyPoints { count: usize },

    #[error("coordinate {axis} = {value} outside {domain}")]
    OutOfDomain {
        axis: usize,
        value: f64,
        domain: &'static str,
    },

    #[error("non-finite coordinate at axis {axis}")]
    NonFinite { axis: usize },

    #[error("sign pattern of (q, p) is inconsistent with the path type at axis {axis}")]
    InconsistentType { axis: usize },

    #[error("path type is not normalized: {0}")]
    NotNormalized(&'static str),

    #[error("condition violated: {0}")]
    ConditionViolation(String),

    #[error("budget {budget} too small, need at least {needed}")]
    BudgetTooSmall { budget: usize, needed: usize },

    #[error("budget exceeded: {needed} evaluations requested, limit {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },

    #[error("objective returned a non-finite value at evaluation {evaluation}")]
    NonFiniteObjective { evaluation: usize },

    #[error("invalid bounds for variable {index}: [{lo}, {hi}]")]
    InvalidBounds { index: usize, lo: f64, hi: f64 },

    #[error("point outside the bounding box on axis {axis}")]
    OutsideBoundingBox { axis: usize },
}
