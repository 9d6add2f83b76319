//! Periodic grids, transforms and the Fourier-multiplier calculus.

mod dealias;
pub mod fft;
mod field;
mod grid;
pub mod ops;

pub use dealias::{dealiased_product, pointwise, pointwise_grouped};
pub(crate) use dealias::{lift, project};
pub use field::{fields_of, spectra_of, Field, MatrixField, ScalarField, Spectrum, VectorField};
pub use grid::{Grid, Padding};
pub use ops::{
    derivative, divergence, divergence_spectrum, dyadic_project, gradient, gradient_spectra,
    inverse_laplacian, jacobian, laplacian, leray_project, leray_spectra, potential_spectra, riesz,
};
