use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),
    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Calling an operation on the wrong kind of input (e.g. regime mismatch).
    #[error("usage error: {0}")]
    Usage(String),
    /// A model invariant or certified bound did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A root finder, search or quadrature failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Usage(_) => 2,
            Error::Invariant(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}
