use std::fmt;
use std::process::ExitCode;

/// Failure category, mapped one-to-one onto the process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Parse = 2,
    Constraint = 3,
    Horizon = 4,
    MinorantViolated = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub failure: Failure,
    pub message: String,
}

impl CliError {
    pub fn new(failure: Failure, message: impl Into<String>) -> Self {
        Self {
            failure,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(Failure::Parse, message)
    }

    pub fn constraint(message: impl Into<String>) -> Self {
        Self::new(Failure::Constraint, message)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.failure as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
