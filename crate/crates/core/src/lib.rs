//! Simulation of on-demand teleportation of dual-rail single-electron qubits.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] holds a sparse fermionic Fock-space engine (fixed particle
//!   number, determinant lifting of single-particle scattering matrices,
//!   projective number measurements and occupation cumulants).
//! * [`circuit`] builds scattering networks out of 2×2 elements and parses
//!   the line-oriented circuit file format.
//! * [`protocol`] runs the ideal teleportation scheme: detector POVM, Bob's
//!   conditional state, efficiencies and occupation-number tomography.
//! * [`saw`] adds Gaussian phase noise (surface-acoustic-wave architecture).
//! * [`leviton`] covers the periodically driven edge-channel architecture,
//!   from photoassisted amplitudes to finite-temperature current correlators.
//! * [`acceptance`] collects the end-to-end verification criteria used by the
//!   test suite and by `eteleport verify`.
//!
//! Data-parallel loops (Monte Carlo samples, parameter grids) go through
//! [`exec`]; with the `parallel` feature disabled they run sequentially and
//! produce bit-identical results.

pub mod acceptance;
pub mod circuit;
pub mod error;
pub mod exec;
pub mod fock;
pub mod leviton;
pub mod linalg;
pub mod protocol;
pub mod saw;

pub use error::{Error, ParseError, Result};
pub use exec::Execution;
pub use num_complex::Complex64;
