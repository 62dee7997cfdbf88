use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoflowError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] geoflow_core::Error),
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = GeoflowError> = std::result::Result<T, E>;

impl GeoflowError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Self::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code: 1 validation, 2 computation, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        use geoflow_core::Error as E;
        match self {
            GeoflowError::Io { .. } => 3,
            GeoflowError::Parse { .. } | GeoflowError::Validation(_) | GeoflowError::Json { .. } => 1,
            GeoflowError::Core(e) => match e {
                E::Validation(_)
                | E::UnknownCity(_)
                | E::UnknownGenre(_)
                | E::Domain(_)
                | E::CyclicHierarchy
                | E::LengthMismatch { .. } => 1,
                _ => 2,
            },
        }
    }
}
