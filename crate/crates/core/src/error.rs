use thiserror::Error;

/// Errors raised by the local orthogonality toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("scenario mismatch: expected {expected}, found {found}")]
    ScenarioMismatch { expected: String, found: String },
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("invalid vertex {0}")]
    InvalidVertex(usize),
    #[error("vertex set is not a clique: {0}")]
    NotAClique(String),
    #[error("invalid arity: {0}")]
    InvalidArity(String),
    #[error("invalid symmetry: {0}")]
    InvalidSymmetry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("no violation in range (0, 1]")]
    NoViolationInRange,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("not an LO inequality: {0}")]
    NotAnLOInequality(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl LoError {
    /// True for errors caused by size limits rather than malformed input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, LoError::CapacityExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, LoError>;
