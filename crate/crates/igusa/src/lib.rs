//! File formats, reference oracles and the command-line driver for
//! [`igusa_core`].

pub mod cli;
pub mod json;
pub mod oracles;
pub mod selftest;

use json::{ErrorBody, ErrorJson};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] igusa_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} acceptance criteria failed")]
    SelftestFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "IoError",
            CliError::Json(_) => "JsonError",
            CliError::Usage(_) => "UsageError",
            CliError::SelftestFailed { .. } => "SelftestFailed",
        }
    }

    /// 3 for numerical non-convergence, 1 for a failed selftest, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_convergence_failure() => 3,
            CliError::SelftestFailed { .. } => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> ErrorJson {
        ErrorJson { error: ErrorBody { kind: self.kind().to_string(), detail: self.to_string() } }
    }
}
