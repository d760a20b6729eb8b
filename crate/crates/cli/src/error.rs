use std::path::PathBuf;

use fieldgen_core::FieldError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Field(#[from] FieldError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {}", failures.join(", "))]
    Verify { failures: Vec<String> },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 for failed checks and numerical failures,
    /// 2 for invalid configurations or fields that do not exist, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Verify { .. } => 1,
            CliError::Field(e) => match e {
                FieldError::Domain(_)
                | FieldError::Unsupported(_)
                | FieldError::NotExists(_)
                | FieldError::Precondition(_)
                | FieldError::Guard { .. } => 2,
                FieldError::Truncation { .. }
                | FieldError::Quadrature { .. }
                | FieldError::Inconsistency(_)
                | FieldError::Conditioning(_)
                | FieldError::Binning(_)
                | FieldError::Fit(_) => 1,
            },
        }
    }
}
