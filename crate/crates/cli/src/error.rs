use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config error: unknown key `{0}`")]
    UnknownKey(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::ChecksFailed(_) => 1,
            Self::Config(_) | Self::UnknownKey(_) | Self::Usage(_) | Self::Io(_) => 2,
            Self::Numerical(_) => 3,
        })
    }
}
