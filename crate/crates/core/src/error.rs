use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid system parameter: {0}")]
    InvalidParams(String),
    #[error("channel dimensions {got:?} do not match system ({expected:?})")]
    DimensionMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("invalid channel gain at (rrh {rrh}, user {user}, sc {sc}): {value}")]
    InvalidGain {
        rrh: usize,
        user: usize,
        sc: usize,
        value: f64,
    },
    #[error("subchannel {sc}: {reason}")]
    InvalidDecision { sc: usize, reason: String },
    #[error("allocation has {got} decisions, expected {expected}")]
    DecisionCount { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("power price mu must be positive, the subproblem is unbounded otherwise")]
    UnboundedSubproblem,
    #[error("FaD subset must be nonempty")]
    EmptySubset,
    #[error("exhaustive RRH enumeration limited to {max} RRHs, got {got}")]
    TooManyRrhs { max: usize, got: usize },
    #[error("dual point must be nonnegative and finite")]
    InvalidDual,
    #[error("ellipsoid shape matrix lost positive definiteness at iteration {0}")]
    ShapeNotPositiveDefinite(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}
