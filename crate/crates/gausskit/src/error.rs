use std::io;

/// Everything a command can fail with, mapped onto the exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numerical(#[from] gausskit_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 1 for bad invocations, 2 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}
