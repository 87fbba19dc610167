use thiserror::Error;

/// Errors produced by planning, rotation, transform and codec operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The decomposition loop exceeded its step budget. This indicates a
    /// policy bug and never fires on inputs inside the planner domain.
    #[error("decomposition did not terminate within {max_steps} steps (residual {residual:e})")]
    NonTermination { max_steps: usize, residual: f64 },

    #[error("fixed-point overflow: {value} outside [{min}, {max}] raw")]
    Overflow { value: i64, min: i64, max: i64 },

    #[error("signed power-of-two expansion of {value} reached {terms} terms with remainder {remainder:e} > {tolerance:e}")]
    ToleranceUnreachable {
        value: f64,
        terms: usize,
        remainder: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
