use std::path::PathBuf;

use thiserror::Error;

use ptrlogic_core::corpus::RecordError;
use ptrlogic_core::generator::GenError;
use ptrlogic_core::preprocess::{BpeError, EncodeError, NormalizeError};
use ptrlogic_neural::NeuralError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Bpe(#[from] BpeError),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("reasoner: {0}")]
    Reasoner(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl HarnessError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Neural(_) => "neural",
            HarnessError::Encode(_) => "encode",
            HarnessError::Normalize(_) => "normalize",
            HarnessError::Generate(_) => "generate",
            HarnessError::Bpe(_) => "bpe",
            HarnessError::Record(_) => "record",
            HarnessError::Reasoner(_) => "reasoner",
            HarnessError::Parse(_) => "parse",
            HarnessError::Config { .. } => "config",
            HarnessError::Io { .. } => "io",
            HarnessError::Invalid(_) => "invalid",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
