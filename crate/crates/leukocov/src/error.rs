use std::io;
use std::path::{Path, PathBuf};

use leukocov_core::Error as CoreError;
use thiserror::Error;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Decode { path: PathBuf, message: String },
    #[error("{0}")]
    Data(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },
}

/// Process exit status for each failure kind.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

impl AppError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn decode(path: &Path, message: impl Into<String>) -> Self {
        Self::Decode {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        Self::Core {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => exit::USAGE,
            Self::Io { .. } | Self::Decode { .. } | Self::Data(_) => exit::DATA,
            Self::Core { source, .. } => match source {
                CoreError::NotPositiveDefinite { .. }
                | CoreError::SingularScatter
                | CoreError::DimensionMismatch { .. }
                | CoreError::NonSymmetric
                | CoreError::LengthMismatch { .. } => exit::NUMERIC,
                CoreError::InvalidParameter(_) => exit::USAGE,
                _ => exit::DATA,
            },
        }
    }

    pub fn core_error(&self) -> Option<&CoreError> {
        match self {
            Self::Core { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Attaches a context string to core errors.
pub trait CoreContext<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> CoreContext<T> for std::result::Result<T, CoreError> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| AppError::core(context(), e))
    }
}
