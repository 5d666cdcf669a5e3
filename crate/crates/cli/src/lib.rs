//! Experiment CLI and file formats on top of `crospec-core`: JSON
//! configuration, CSV/JSON emission, and the four reproducible
//! subcommands (`simulate`, `error-curves`, `verify-theorems`,
//! `filter-factors`).

// `!(x > 0.0)` style guards reject NaN; the suggested `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod formats;

pub use config::ExperimentConfig;

/// Errors surfaced by the experiment runner. Everything here maps to
/// process exit code 2; a failed theorem check is not an error but a
/// `false` returned by [`commands::cmd_verify_theorems`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] crospec_core::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
