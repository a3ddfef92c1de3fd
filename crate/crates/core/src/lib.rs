//! Defocusing mKdV on a nonzero background: direct scattering, phase and
//! saddle geometry, explicit long-time asymptotics, and a reference PDE solver.

pub mod error;
pub mod interp;
pub mod phase;
pub mod scattering;
pub mod asymptotics;
pub mod pde;
pub mod harness;
pub mod cli;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
