use relay_bounds::BoundsError;

/// Failure of a subcommand, classified by process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Inconsistent flags.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input file.
    #[error("{0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] BoundsError),
    #[error("write failed: {0}")]
    Output(String),
    #[error("{failures} verification instance(s) failed")]
    VerifyFailed { failures: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Output(_) => 1,
            CliError::VerifyFailed { .. } => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
