//! Well-balanced, positivity-preserving, free-energy-dissipating finite-volume
//! schemes for 1D hydrodynamic systems with damping and nonlocal forces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convolution;
pub mod diagnostics;
pub mod error;
pub mod flux;
pub mod free_energy;
pub mod grid;
pub mod integrator;
pub mod reconstruction;
pub mod runner;

pub use error::{Error, Result};
