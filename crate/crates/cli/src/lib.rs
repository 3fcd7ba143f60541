//! Library behind the `skytilt` binary: scenario generation, tracking runs,
//! and report aggregation, all with deterministic file output.

pub mod config;
pub mod report;
pub mod simulate;
pub mod track;

use thiserror::Error;

/// Command errors mapped onto process exit codes: 2 configuration,
/// 3 data, 4 internal numeric failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {message}")]
    Config { message: String },
    #[error("data error: {message}")]
    Data { message: String },
    #[error("internal error: {message}")]
    Internal { message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Data { .. } => 3,
            CliError::Internal { .. } => 4,
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data { message: message.into() }
    }
}

impl From<skytilt::io::FormatError> for CliError {
    fn from(e: skytilt::io::FormatError) -> Self {
        CliError::Data { message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data { message: e.to_string() }
    }
}

/// Mask filename for frame `index` inside a scenario's `masks/` directory.
pub fn mask_filename(index: usize) -> String {
    format!("frame_{index:06}.pgm")
}
