//! Quantum-inequality bounds from spectral analysis of discretized integral
//! operators.
//!
//! Everything is computed in units with ħ = m = λ = 1 and rescaled at the
//! reporting boundary.

pub mod backflow;
pub mod dynamical;
pub mod flux;
pub mod kernels;
pub mod numerics;
pub mod operator_lab;
pub mod wigner;

mod error;

pub use error::{Error, Result};
