use thiserror::Error;

/// Errors raised by the arithmetic, the expansion algorithms and the sweeps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{d} is not a square in Q_{p}")]
    NotAResidue { d: String, p: String },

    #[error("division by zero")]
    DivisionByZero,

    /// A state the algorithms can never reach on valid inputs.
    #[error("impossible state: {0}")]
    ImpossibleState(String),

    #[error("expansion terminated: the complete quotient equals its floor")]
    Terminated,

    /// A proven identity or invariant failed. Any occurrence is either a bug
    /// or a counterexample worth keeping.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("index {index} out of range (only {available} available)")]
    Range { index: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code used by the command-line front end: 1 for internal
    /// invariant failures, 2 for everything the caller can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ImpossibleState(_) | Error::InvariantViolation(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
