use std::path::PathBuf;

use chrono::NaiveDate;

#[derive(Debug, thiserror::Error)]
pub enum Error {
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
    #[error("{}: duplicate date {date}", path.display())]
    DuplicateDate { path: PathBuf, date: NaiveDate },
    #[error("{}: {message}", path.display())]
    Integrity { path: PathBuf, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] infoflow_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for unreadable data, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::DuplicateDate { .. }
            | Error::Integrity { .. }
            | Error::Json(_) => 2,
            Error::Io { .. } | Error::Config(_) | Error::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
