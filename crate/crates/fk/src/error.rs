use fk_core::FkError;

/// CLI failure, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad config, bad flags, or an incompatible request. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Solver breakdown or I/O failure during a run. Exit code 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<FkError> for CliError {
    fn from(e: FkError) -> Self {
        match e {
            FkError::Solver { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
