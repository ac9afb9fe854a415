use std::process::ExitCode;

use thiserror::Error;

/// Failures that end a command before any gate is evaluated.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<membrane::Error> for CliError {
    fn from(e: membrane::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    StatisticalFailure,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::StatisticalFailure
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::StatisticalFailure => 1,
        }
    }
}

pub fn exit_code(r: &Result<Outcome, CliError>) -> ExitCode {
    ExitCode::from(match r {
        Ok(o) => o.code(),
        Err(e) => e.code(),
    })
}
