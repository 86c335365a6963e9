use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{unknowns} unknowns exceed the budget of {limit}")]
    Budget { unknowns: usize, limit: usize },
    #[error("lattice supports N in {{2, 3}}, got {0}")]
    UnsupportedN(usize),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("no convergence after {iterations} iterations; residuals {residuals:?}")]
    NonConvergence { iterations: usize, residuals: Vec<f64> },
    #[error(transparent)]
    Core(#[from] slly_core::Error),
}
