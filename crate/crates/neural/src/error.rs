use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeuralError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sequence of length {len} exceeds the maximum {max}")]
    LengthOverflow { len: usize, max: usize },
    #[error("target index {index} out of range for input of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("empty input sequence")]
    EmptyInput,
    #[error("non-finite gradient in {tensor}")]
    NonFiniteGradient { tensor: &'static str },
    #[error("non-finite loss")]
    NonFiniteLoss,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
