use thiserror::Error;

/// Failures of a command, grouped by process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<coex_core::Error> for CliError {
    fn from(e: coex_core::Error) -> Self {
        use coex_core::Error as E;
        match e {
            E::Config(_) | E::LteuLimit(_) | E::Domain(_) | E::EmptyInterval => CliError::Config(e.to_string()),
            E::NoConvergence { .. } | E::Consistency(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
