//! Batch experiment runner binding the toolkit: configuration, seeding,
//! execution and report emission. Identical configs produce identical
//! report bytes for exact-arithmetic experiments, regardless of the
//! worker-pool width.

pub mod config;
pub mod run;

use thiserror::Error;

pub use config::{
    CommutatorConfig, ConstantsConfig, CoverRunConfig, ExperimentConfig, VerifyConfig,
};
pub use run::{generate_polynomial, run, RunOutput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {message}")]
    Config { field: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] bergman_core::CoreError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Config {
            field,
            message: message.into(),
        }
    }
}
