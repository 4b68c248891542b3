use std::fmt;

/// Failure of a command, mapped onto the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration: exit 1.
    Usage(String),
    /// Unreadable or invalid input data, or a pipeline failure: exit 2.
    Data(swb_core::Error),
    /// A solver hit its iteration cap under `--strict`: exit 3.
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "{e}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
        }
    }
}

impl From<swb_core::Error> for CliError {
    fn from(e: swb_core::Error) -> Self {
        CliError::Data(e)
    }
}
