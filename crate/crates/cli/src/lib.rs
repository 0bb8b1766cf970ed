//! Batch front end: reads an experiment config, runs one task, and writes a
//! JSON result document (plus a CSV for ε sweeps).

pub mod config;
pub mod report;
mod tasks;

pub use config::{ExperimentConfig, Task};
pub use report::{Document, Outcome, Status};
pub use tasks::{compare, run};

use std::fmt;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Compute(rimbound::Error),
}

impl CliError {
    pub(crate) fn config(key: &str, e: rimbound::Error) -> Self {
        CliError::Config(format!("{key}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rimbound::Error> for CliError {
    fn from(e: rimbound::Error) -> Self {
        CliError::Compute(e)
    }
}
