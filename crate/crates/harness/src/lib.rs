//! Training loop, evaluation, transfer experiments and reporting on top of
//! the symbolic and neural crates.

pub mod baseline;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod report;
pub mod store;
pub mod train;

pub use config::{Precision, RunConfig};
pub use error::HarnessError;
pub use eval::{evaluate_exact_match, evaluate_transfer, RunMetrics};
pub use train::{init_model, train, TrainOptions, TrainOutcome};
