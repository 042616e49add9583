//! File formats, parallel batch drivers, and shared plumbing for the
//! `gatesim` command-line tool.

pub mod config;
pub mod output;
pub mod parallel;

use std::fmt;

/// CLI failure classes, mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or flags (exit 2).
    Config(String),
    /// Numerical abort inside a simulation (exit 3).
    Numerical(String),
    /// Filesystem trouble (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> CliError {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical abort: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gatesim_core::ConfigError> for CliError {
    fn from(err: gatesim_core::ConfigError) -> CliError {
        CliError::Config(err.to_string())
    }
}
