use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, columns {columns}: {message}")]
    PdbParse {
        line: usize,
        columns: &'static str,
        message: String,
    },

    #[error("duplicate atom serial {serial} (line {line})")]
    DuplicateSerial { serial: u32, line: usize },

    #[error("invalid pharmacophore spec: {0}")]
    Spec(String),

    #[error("unknown pharmacophore kind {found:?}; expected one of HD, HA, HP, AR")]
    UnknownKind { found: String },

    #[error("duplicate pharmacophore label {0:?}")]
    DuplicateLabel(String),

    #[error("point {label:?} references atom serial {serial}, which is not in the structure")]
    MissingSerial { label: String, serial: u32 },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} needs {requested}, above the cap of {cap}{hint}")]
    ResourceCap {
        what: &'static str,
        requested: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 config, 3 infeasible, 4 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 3,
            Error::ResourceCap { .. } => 4,
            _ => 2,
        }
    }
}
