use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    #[error("{0}")]
    BadInput(String),

    /// Planning request with no feasible answer (exit 3).
    #[error("{0}")]
    Infeasible(String),

    #[error(transparent)]
    Model(#[from] noma_cell::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Model(noma_cell::Error::InvalidParameter { .. }) => 2,
            CliError::Model(noma_cell::Error::NoCoverage(_))
            | CliError::Model(noma_cell::Error::Infeasible { .. }) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn bad(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::BadInput(format!("{field}: {reason}"))
}
