use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed file content. `location` names the file and the byte offset
    /// or line number of the offending record.
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("empty window")]
    EmptyWindow,
    #[error("no comparable windows")]
    NoComparableWindows,
    #[error("reference has no detections")]
    NoReferenceDetections,
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Computation,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Parse { .. } | Error::Invalid(_) => ErrorKind::Validation,
            Error::EmptyWindow | Error::NoComparableWindows | Error::NoReferenceDetections => {
                ErrorKind::Computation
            }
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
