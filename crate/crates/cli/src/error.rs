use std::io;

use thiserror::Error;

/// Failures, split by exit code: 1 for usage, 2 for numerical health.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<dpi_core::Error> for CliError {
    fn from(e: dpi_core::Error) -> Self {
        use dpi_core::Error as E;
        match e {
            E::NonConvergence { .. } | E::InsufficientModes { .. } | E::Quadrature(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
