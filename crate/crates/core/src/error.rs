use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants line up with the CLI exit-code contract: `Resource` maps to
/// exit code 3, everything else that stems from bad input maps to 2.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs live on incompatible spaces (outcome sets, alphabets, dimensions).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter or configuration violates its contract.
    #[error("invalid specification: {0}")]
    Spec(String),

    /// An enumeration would exceed the configured cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Exponent fitting could not be performed.
    #[error("fit error: {0}")]
    Fit(String),

    /// A constructed witness failed re-verification.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
