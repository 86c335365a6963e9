//! Exact verification engine for the N-boson delta-interaction gas on a line
//! and its N=2 supersymmetric extension.
//!
//! Wavefunctions are represented exactly as sums of complex exponentials on
//! each ordering chamber of R^N ([`piecewise`]). On top of that calculus sit
//! the Bethe-ansatz and bound-state constructors ([`bethe`]), the finite
//! fermionic Fock space with its graded operator algebra ([`fock`]), and the
//! supercharges, sector Hamiltonians and zero modes of the supersymmetric
//! system ([`susy`]).
//!
//! Conventions: hbar = 1, particle mass 1/2, so the kinetic term is the plain
//! negative Laplacian. Particle and fermionic mode indices are zero-based in
//! the API; rendered reports use one-based labels.

pub mod bethe;
pub mod error;
pub mod fock;
pub mod piecewise;
pub mod susy;

pub use error::{Error, Result};
pub use num_complex::Complex64;
