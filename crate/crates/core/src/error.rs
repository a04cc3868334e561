use std::path::PathBuf;

/// Everything that can go wrong inside the toolkit.
///
/// The variants double as the error categories reported by the command line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration is internally inconsistent (dimensions, ranges, flags).
    #[error("config error: {0}")]
    Config(String),

    /// Input data violates a contract; `index` points at the offending record.
    #[error("data error at record {index}: {message}")]
    Data { index: usize, message: String },

    /// Text or binary input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
