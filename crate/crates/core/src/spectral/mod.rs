//! Truncated Fourier representation on the unit torus `[0,1]^3`.

mod calculus;
mod domain;
mod fft;
mod field;

pub use calculus::{
    dealias_cutoff, dealias_mask, derivative, divergence, divergence_residual, galerkin_truncate,
    gradient_norm_sq,
    galerkin_truncate_vector, gradient, horizontal_laplacian, laplacian, leray_project,
};
pub(crate) use calculus::{project_mode, scatter};
pub use domain::{Domain, HERMITIAN_TOLERANCE};
pub(crate) use domain::split_at;
pub use field::{
    conjugate_slot, cube_norm, slot, wavenumber, wavevector_at, SpectralField, VectorField,
    Wavevector,
};
