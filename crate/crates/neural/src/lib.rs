//! Sequence-to-sequence model with an LSTM encoder and a pointer (or
//! closed-vocabulary) LSTM decoder, trained with hand-written gradients.

pub mod attention;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod lstm;
pub mod model;
pub mod optim;
pub mod params;
pub mod real;
pub mod tensor;
pub mod vocab;

pub use config::{DecoderKind, ModelConfig, OptimizerKind, TrainConfig};
pub use error::NeuralError;
pub use model::{Example, Model};
pub use params::Params;
pub use real::Real;
