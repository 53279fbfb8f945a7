use std::path::PathBuf;

use thiserror::Error;

/// Every failure mode of the toolkit.
///
/// Variants map onto the categories surfaced by the CLI (argument, schema,
/// state, ...) so callers can branch on the kind without string matching.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("schema error in column `{column}`: {message}")]
    Schema { column: String, message: String },

    #[error("encoding error in column `{column}`: unseen token `{token}`")]
    Encoding { column: String, token: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dataset not found at {}", .0.display())]
    MissingData(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn argument(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }

    pub(crate) fn schema(column: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            column: column.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable name of the error category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Schema { .. } => "schema",
            Error::Encoding { .. } => "encoding",
            Error::Argument(_) => "argument",
            Error::State(_) => "state",
            Error::Contract(_) => "contract",
            Error::UndefinedMetric(_) => "undefined_metric",
            Error::Config(_) => "config",
            Error::MissingData(_) => "missing_data",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
