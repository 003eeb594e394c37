use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),

    #[error("binding for `{0}`, which does not occur in the expansion")]
    UnknownSymbol(String),

    #[error("invalid leaf label `{0}`")]
    InvalidLabel(String),

    #[error("leaf label `{0}` is not supported here")]
    UnsupportedLabel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The arguments leave the region where the expansion or transform is valid.
    #[error("outside numeric domain: {0}")]
    Domain(String),

    #[error("no convergence at step {step}: {reason}")]
    Convergence { step: usize, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by leaving a numeric domain (blow-up, divergent series).
    pub fn is_numeric_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Convergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
