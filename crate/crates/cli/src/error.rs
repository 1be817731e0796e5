use std::io;

use contact_core::ContactError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("integration failed at step {step}: {source}")]
    Integration {
        step: usize,
        #[source]
        source: ContactError,
    },
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Integration { .. } => 2,
            CliError::Check(_) => 3,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<ContactError> for CliError {
    fn from(e: ContactError) -> Self {
        CliError::Config(e.to_string())
    }
}
