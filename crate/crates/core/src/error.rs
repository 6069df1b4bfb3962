use thiserror::Error;

/// Errors raised by the library.
///
/// `Invariant` is reserved for violated mathematical identities (a failed
/// functional equation, a point count outside the Hasse window, ...). Callers
/// treat it as a hard failure, never as a warning.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field size q = {q}: {reason}")]
    InvalidField { q: u64, reason: &'static str },

    #[error("field mismatch: q = {left} vs q = {right}")]
    FieldMismatch { left: u32, right: u32 },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("{0}: polynomial must be monic")]
    NotMonic(&'static str),

    #[error("{0}: polynomial must be irreducible")]
    NotIrreducible(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {what} (estimated cost: {estimate})")]
    Infeasible { what: String, estimate: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("root finding did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
