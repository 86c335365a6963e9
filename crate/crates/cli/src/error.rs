use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 1,
            CliError::NonConvergence(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

impl From<slly_core::Error> for CliError {
    fn from(e: slly_core::Error) -> Self {
        match e {
            slly_core::Error::Discontinuous { .. } => CliError::Verification(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<slly_lattice::Error> for CliError {
    fn from(e: slly_lattice::Error) -> Self {
        match e {
            slly_lattice::Error::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
