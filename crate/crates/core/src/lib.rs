//! Library for the Galerkin-truncated 3D MHD-Boussinesq system on the unit torus.

pub mod error;
mod par;
pub mod cli;
pub mod diagnostics;
pub mod dynamics;
pub mod experiments;
pub mod io;
pub mod spectral;
pub mod timestepper;

pub use error::{MhdError, Result};
pub use par::{execution_mode, thread_count, with_threads};
