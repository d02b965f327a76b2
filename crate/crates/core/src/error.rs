use std::path::PathBuf;

/// Errors produced by the optimizers, oracles and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violated its precondition. The message names the constraint.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// `true` for errors caused by a bad configuration or parameter, as opposed
    /// to failures while running (I/O, serialization).
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::DimensionMismatch { .. } | Error::Config(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
