use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid configuration, input CSV or chain file.
    #[error("{0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("chain invalid: {0}")]
    ChainInvalid(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::ChainInvalid(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(err: CliError) -> Self {
        ExitCode::from(err.exit_code())
    }
}

impl From<rumorsim::OdeError> for CliError {
    fn from(err: rumorsim::OdeError) -> Self {
        match err {
            rumorsim::OdeError::Model(e) => CliError::Config(e.to_string()),
            e @ rumorsim::OdeError::Diverged { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<rumorsim::SimError> for CliError {
    fn from(err: rumorsim::SimError) -> Self {
        match err {
            rumorsim::SimError::Model(e) => CliError::Config(e.to_string()),
            e => CliError::Numeric(e.to_string()),
        }
    }
}
