use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value outside the domain of the operation (bad index, mismatched
    /// radicand, zero divisor, unsupported sequence id, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The input pair or tuple does not satisfy the equation it was handed with.
    #[error("not a solution: {what} gives {value}, expected k = {k}")]
    NotASolution {
        what: String,
        value: String,
        k: String,
    },

    /// A jump produced a non-positive coordinate.
    #[error("invalid jump: {0}")]
    InvalidJump(String),

    /// The operation is not available for these parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An internal consistency check failed (for example a closed form whose
    /// irrational part does not cancel).
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
