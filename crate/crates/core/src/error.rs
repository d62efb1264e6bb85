use std::path::PathBuf;

use thiserror::Error;

use crate::metric::MetricValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input shape: non-square tables, non-finite entries, carrier mismatches.
    #[error("structural input error: {0}")]
    Structural(String),

    /// A well-formed input outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("exact search needs {candidates} candidate centers, limit is {limit}")]
    Capacity { candidates: usize, limit: usize },

    #[error("points {0} and {1} lie in different chain components")]
    DifferentComponents(usize, usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("distance table is not a metric: {0}")]
    InvalidMetric(Box<MetricValidationReport>),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
