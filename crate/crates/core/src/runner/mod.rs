// SPDX-License-Identifier: Apache-2.0

//! Experiment orchestration behind the `entropic` binary: configuration,
//! sweeps, tabular output and the verification battery.

pub mod config;
pub mod experiments;
pub mod table;
pub mod verify;

pub use config::{parse_config, BuiltSystem, ExperimentConfig, OutputFormat, Sweep, SystemSpec, Tolerances};
pub use experiments::{run_classical, run_fcs, run_functionals};
pub use table::{CheckRow, CheckStatus, CurveRow, DistributionRow, ResultTable};
pub use verify::{run_verify, VerifyReport};

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error at `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: crate::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        RunError::Validation {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn numerical(context: impl Into<String>, source: crate::Error) -> Self {
        RunError::Numerical {
            context: context.into(),
            source,
        }
    }

    /// Process exit code for this error. Both config categories share code 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) | RunError::Validation { .. } => EXIT_CONFIG,
            RunError::Numerical { .. } => EXIT_NUMERICAL,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

/// Attaches a context string to library errors.
pub(crate) trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, RunError>;
}

impl<T> Context<T> for crate::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, RunError> {
        self.map_err(|e| RunError::numerical(what(), e))
    }
}
