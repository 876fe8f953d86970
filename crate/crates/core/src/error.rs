use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    /// A precondition of an operation was not met by its caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Parsed structure that cannot be turned into a well-formed graph.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("tokenizer error: {0}")]
    Tokenizer(String),

    #[error("model backend error: {0}")]
    Backend(String),

    #[error("invalid document {what}: {source}")]
    Json {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
