//! Thin wrappers over `libm` so the crate builds without `std`.

pub use libm::{cos, sin, sqrt};

#[inline]
pub fn cis(theta: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(cos(theta), sin(theta))
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `2^{j s}` for a band index and regularity exponent.
#[inline]
pub fn band_weight(j: usize, s: f64) -> f64 {
    libm::exp2(j as f64 * s)
}
