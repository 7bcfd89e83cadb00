use std::process::ExitCode;

use bergtoric_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for configuration and i/o problems, 3 for numerical failures, 4 for
    /// violated invariants.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn to_exit_code(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidPolytope(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::AlphaOutsideDilate { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::EnumerationBudget { .. }
            | CoreError::UnsupportedMethod(_) => CliError::Config(e.to_string()),
            CoreError::NotPositiveDefinite { .. } => CliError::Invariant(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
