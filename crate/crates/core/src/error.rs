use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration or arguments.
    #[error("configuration error: {0}")]
    Config(String),
    /// Loss of positivity, non-convergence or other numerical breakdown.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A consistency check between two independent computations failed.
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Csv(_) => 2,
            Error::Numerical(_) => 3,
            Error::Consistency(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
