//! Experiment runner behind the `graphdistill` binary.
//!
//! | exit code | meaning                                   |
//! |-----------|-------------------------------------------|
//! | 0         | success                                   |
//! | 2         | usage or configuration error              |
//! | 3         | runtime error (I/O, solver, training, …)  |
//! | 4         | output directory locked by another run    |

pub mod commands;
pub mod config;
mod output;

pub use config::{load, RunConfig};
pub use output::{format_num, Output, LOCK_FILE};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("output directory {0} is locked by another run (remove the lock file if stale)")]
    LockHeld(PathBuf),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
            CliError::LockHeld(_) => 4,
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}

runtime_from!(
    graphdistill::EnvError,
    graphdistill::PolicyError,
    graphdistill::SttaError,
    graphdistill::GraphError,
    graphdistill::ToolError
);
