use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("convergence error: {0}")]
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Wraps a library error, keeping non-convergence distinct.
    pub fn lib(context: impl std::fmt::Display, err: lwr::Error) -> Self {
        match err {
            lwr::Error::NotConverged { .. } | lwr::Error::SvmNotConverged { .. } => {
                CliError::Convergence(format!("{context}: {err}"))
            }
            other => CliError::Data(format!("{context}: {other}")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
