use std::io;
use std::path::PathBuf;

/// Everything that makes a subcommand stop before producing a report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {key}: {msg}")]
    Config { key: String, msg: String },
    #[error("config error: line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("I/O error: {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("format error: {}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical error: {0}")]
    Core(#[from] infharm2d_core::Error),
}

impl CliError {
    pub fn config(key: &str, msg: impl Into<String>) -> Self {
        CliError::Config { key: key.to_string(), msg: msg.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Errors never mean a failed check, so they all map to the usage code.
    pub fn exit_code(&self) -> u8 {
        EXIT_USAGE
    }
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
