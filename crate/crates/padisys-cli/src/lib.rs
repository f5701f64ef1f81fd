//! Batch front door for the toolkit: parses TOML configs, dispatches the
//! analyses and writes CSV reports with a fixed exit-code contract.
//!
//! Exit codes: 0 pass, 1 analysis negative, 2 config error, 3 unknown
//! model, 4 numerical precondition failure, 10 IO or internal error.

pub mod commands;
pub mod config;
pub mod data;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("numerical precondition failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNKNOWN_MODEL: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_IO: i32 = 10;

pub fn exit_code(outcome: &Result<bool, CliError>) -> i32 {
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_NEGATIVE,
        Err(CliError::Config(_)) => EXIT_CONFIG,
        Err(CliError::UnknownModel(_)) => EXIT_UNKNOWN_MODEL,
        Err(CliError::Numerical(_)) => EXIT_NUMERICAL,
        Err(CliError::Io(_)) => EXIT_IO,
    }
}

/// Deterministic float formatting for CSV bodies: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
