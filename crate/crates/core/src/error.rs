use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A syntax error with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected} points, got {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid incidence literal: {0}")]
    InvalidIncidence(String),

    #[error(transparent)]
    Syntax(#[from] ParseError),

    #[error("unbound atom `{0}`")]
    UnboundAtom(String),

    #[error("point {index} out of range for a space of {width} points")]
    PointOutOfRange { index: usize, width: usize },

    #[error("conditioning sentence `{0}` has probability zero")]
    ZeroProbabilityCondition(String),

    #[error("correlation undefined: `{0}` has probability 0 or 1")]
    DegenerateMarginal(String),

    #[error("unknown sentence `{0}`")]
    UnknownSentence(String),

    #[error("inconsistent bounds for `{0}`: inf is not contained in sup")]
    Inconsistent(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("infeasible targets: {0}")]
    Infeasible(String),

    #[error("invalid target specification: {0}")]
    InvalidTarget(String),

    #[error("invalid records: {0}")]
    InvalidRecords(String),

    #[error("line {line}: {message}")]
    Kb { line: usize, message: String },
}
