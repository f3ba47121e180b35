use thiserror::Error;

/// Text-format error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector lengths differ: x has {x}, a has {a}, b has {b}")]
    LengthMismatch { x: usize, a: usize, b: usize },

    /// `index` is zero-based.
    #[error("division by zero: x[{index}] = 0")]
    DivisionByZero { index: usize },

    #[error("dimension {n} exceeds the expansion limit {limit}")]
    DimensionLimit { n: usize, limit: usize },

    #[error("subset index {index} out of range for dimension {n}")]
    SubsetIndex { index: usize, n: usize },

    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
