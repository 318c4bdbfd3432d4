//! Pipeline plumbing behind the `skillscope` binary.

pub mod config;
pub mod output;
pub mod pipeline;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Data(skillscope_core::Error),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<skillscope_core::Error> for CliError {
    fn from(e: skillscope_core::Error) -> Self {
        use skillscope_core::Error as E;
        match e {
            E::Invariant(msg) => CliError::Invariant(msg),
            E::InvalidConfig { .. } => CliError::Usage(e.to_string()),
            other => CliError::Data(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Fails with a usage error naming `path` when it is not a readable file.
pub fn require_file(path: &std::path::Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} file not found: {}", path.display())))
    }
}
