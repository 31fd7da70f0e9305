use std::io;

/// Errors produced while ingesting, mining, or serializing.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: assertion subject is a literal")]
    LiteralSubject { line: usize },

    #[error("pattern file has no traceable lineage: {0}")]
    Lineage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
