//! Crate-wide error type.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// A dataset file could not be parsed.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A file was syntactically valid but violated the expected schema
    /// (wrong version tag, wrong feature width, broken invariant).
    #[error("format error: {0}")]
    Format(String),

    /// The model's input/output dimensions do not match the trigger or
    /// dataset it is being paired with. Distinct from a negative
    /// verification decision: this model cannot be the model in question.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
