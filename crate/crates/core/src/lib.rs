//! Numerical toolkit for viscous contact waves of the compressible
//! Navier-Stokes equations on `R x T^2`.
//!
//! The crate covers the self-similar entropy-wave profile, the diffusion-wave
//! ansatz built around it, a finite-difference/spectral solver for the full
//! 3-d system, the anti-derivative energy diagnostics and decay-rate fitting.

pub mod ansatz;
pub mod config;
pub mod decay;
pub mod error;
pub mod gas;
#[cfg(test)]
mod invariants;
pub mod io;
pub mod modes;
pub mod profile;
pub mod solver;

pub use ansatz::{Ansatz, MassCoefficients, TildeState};
pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use gas::{EndStates, GasParams, Primitive, StatePoint};
pub use profile::ProfileTable;
pub use solver::{ChannelGrid, ConservedField};
