//! Library surface of the experiment CLI, exposed for integration tests.

pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fedsvdd::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Exit codes: 0 success, 1 partial failure, 2 configuration error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
