use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("particle count {n} outside the supported range {min}..={max}")]
    Size { n: usize, min: usize, max: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("index {index} out of range for {n} particles/modes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("point lies within {tol:e} of a coincidence hyperplane; pick a side explicitly")]
    AmbiguousPoint { tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input is discontinuous across an interface (residual {residual:e})")]
    Discontinuous { residual: f64 },

    #[error("S-matrix pole at k_i = {ki}, k_j = {kj}; use the bound-state constructors")]
    Singularity { ki: String, kj: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate string: monomer and dimer momenta coincide (P = Q = {0})")]
    DegenerateString(f64),

    #[error("momentum set is not a valid string: energy has imaginary part {0:e}")]
    StringValidity(f64),

    #[error("operator does not commute with the fermion number")]
    Grading,

    #[error("unsupported particle count {0} for this operation")]
    UnsupportedN(usize),

    #[error("spinor is not of pure grade")]
    MixedGrade,

    #[error("supercharge maps the state to zero: supersymmetry singlet")]
    Singlet,
}
