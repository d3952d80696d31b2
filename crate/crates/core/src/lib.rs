//! Fock-space simulation of heralded non-Gaussian operations (quantum
//! scissors and photon subtraction) acting on a two-mode squeezed vacuum that
//! is distributed over a lossy channel, with logarithmic-negativity and
//! covariance-based secret-key-rate evaluation.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod keyrate;
mod linalg;
pub mod optics;
pub mod sweep;

pub use error::{Error, Result};
