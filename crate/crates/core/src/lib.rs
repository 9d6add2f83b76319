//! Pseudo-spectral toolkit for incompressible Hookean elastodynamics in
//! Lagrangian coordinates on the periodic torus.
//!
//! The unknown is the displacement `Y = X - y` of the flow map `X`. The
//! incompressibility constraint `det(I + ∇Y) = 1` is split into a
//! divergence-free part that obeys a semilinear wave equation with a null-form
//! nonlinearity and a curl-free part that is slaved algebraically to `∇Y`
//! through the principal-minor sums `E_k(∇Y)`.
//!
//! The crate is `no_std` (it only needs `alloc`). File formats, configuration
//! and the command line live in the companion `hookean` crate.
//!
//! Layout:
//! - [`spectral`]: grids, FFTs, Fourier multipliers, dealiased products.
//! - [`hookean`]: minors, curl-free reconstruction, null form, compatible data.
//! - [`wave`]: free-wave propagator, Duhamel integral, discrete d'Alembertian.
//! - [`solver`]: Picard fixed-point solver and the direct pressure stepper.
//! - [`diagnostics`]: Besov norms, energy, 2-variation, sweep analytics.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diagnostics;
mod error;
pub mod hookean;
pub(crate) mod math;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod wave;

pub use error::{Error, Result};
pub use spectral::{Field, Grid, MatrixField, ScalarField, Spectrum, VectorField};
