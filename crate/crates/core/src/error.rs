use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid record {record}: {rule}")]
    InvalidRecord { record: String, rule: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("duplicate user_id {0:?}")]
    DuplicateUser(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("design matrix is rank deficient (numerical rank {rank}); dependent columns: {}", .columns.join(", "))]
    RankDeficient { rank: usize, columns: Vec<String> },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("missing feature column {0:?}")]
    MissingColumn(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
