//! Finite-difference oracle for the sector Hamiltonians: Dirichlet box, delta
//! lines as `(1/h)` on the coincidence set, preconditioned LOBPCG.

pub mod check;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod precond;
pub mod sector;
pub mod sparse;

pub use error::{Error, Result};
