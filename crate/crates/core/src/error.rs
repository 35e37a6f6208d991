use std::path::PathBuf;

use thiserror::Error;

use crate::dsml::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("network: {0}")]
    Network(String),

    #[error("gtfs: {0}")]
    Gtfs(String),

    #[error("demand: {0}")]
    Demand(String),

    #[error("routing: {0}")]
    Routing(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("energy: {0}")]
    Energy(String),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("vehicle catalog: {0}")]
    Catalog(String),

    #[error("validation failed with {} error(s)", .0.len())]
    Validation(Vec<crate::diagnostics::Diagnostic>),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures reading or writing files, as opposed to bad content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
