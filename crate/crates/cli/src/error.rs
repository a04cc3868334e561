use std::path::PathBuf;

use esl_core::{Error, MetricError};

/// Failure categories of the command line tool, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Io { .. } => 5,
            CliError::Domain(_) => 6,
            CliError::Data(_) => 7,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) => CliError::Domain(m),
            Error::Config(m) => CliError::Config(m),
            Error::Data { .. } => CliError::Data(e.to_string()),
            Error::Parse { .. } => CliError::Parse(e.to_string()),
            Error::Io { path, source } => CliError::Io { path, source },
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::ShapeMismatch(..) => CliError::Data(e.to_string()),
            MetricError::NoOverlap | MetricError::NoGroundTruth => CliError::Domain(e.to_string()),
        }
    }
}
