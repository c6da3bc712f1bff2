use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A floating-point routine failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// An operator generator could not produce the entry at `(row, col)`
    /// (1-based).
    #[error("cannot evaluate entry ({row}, {col}): {reason}")]
    Evaluation {
        row: usize,
        col: usize,
        reason: String,
    },

    /// A convexity or compactness hypothesis required by the request fails.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn size(msg: impl Into<String>) -> Self {
        Error::SizeMismatch(msg.into())
    }
}
