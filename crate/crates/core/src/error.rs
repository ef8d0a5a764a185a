use thiserror::Error;

/// Errors surfaced by the evaluators and the Monte Carlo engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated (bad τ, y = 0 where a
    /// complex eigenvalue is required, invalid ensemble/order combination).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to converge or a backend call failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
