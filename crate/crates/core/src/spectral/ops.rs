//! Fourier-multiplier calculus.
//!
//! Odd-order symbols (`iξ_a`, Riesz, Leray couplings) use frequencies with
//! the Nyquist component zeroed, so real fields stay real. Every operator
//! that divides by `|ξ|` sets the zero mode of its output to 0; the checked
//! variants reject inputs whose mean is not negligible.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::field::{fields_of, Field, ScalarField, Spectrum, VectorField};
use super::MatrixField;
use crate::math;
use crate::{Error, Result};

impl Spectrum {
    /// `∂_axis`, multiplier `iξ_axis`.
    pub fn derivative(&self, axis: usize) -> Spectrum {
        let grid = self.grid().clone();
        assert!(axis < grid.dim(), "axis {axis} out of range");
        self.multiplied(|i| Complex64::new(0.0, grid.odd_frequency(i)[axis]))
    }

    /// `Δ`, multiplier `-|ξ|²`.
    pub fn laplacian(&self) -> Spectrum {
        let grid = self.grid().clone();
        self.scaled_by(|i| -grid.norm_sq(i))
    }

    /// `Δ⁻¹` with the zero mode of the output set to 0 (no mean check).
    pub fn inverse_laplacian_unchecked(&self) -> Spectrum {
        let grid = self.grid().clone();
        self.scaled_by(|i| {
            let k2 = grid.norm_sq(i);
            if k2 == 0.0 {
                0.0
            } else {
                -1.0 / k2
            }
        })
    }

    pub fn inverse_laplacian(&self) -> Result<Spectrum> {
        self.require_mean_free()?;
        Ok(self.inverse_laplacian_unchecked())
    }

    /// `|∇|`
    pub fn abs_gradient(&self) -> Spectrum {
        let grid = self.grid().clone();
        self.scaled_by(|i| math::sqrt(grid.norm_sq(i)))
    }

    /// `|∇|⁻¹` with the zero mode dropped (no mean check).
    pub fn inverse_abs_gradient_unchecked(&self) -> Spectrum {
        let grid = self.grid().clone();
        self.scaled_by(|i| {
            let k2 = grid.norm_sq(i);
            if k2 == 0.0 {
                0.0
            } else {
                1.0 / math::sqrt(k2)
            }
        })
    }

    pub fn inverse_abs_gradient(&self) -> Result<Spectrum> {
        self.require_mean_free()?;
        Ok(self.inverse_abs_gradient_unchecked())
    }

    /// `R_i = (-Δ)^{-1/2} ∂_i`, multiplier `iξ_i/|ξ|`.
    pub fn riesz(&self, i: usize) -> Result<Spectrum> {
        let grid = self.grid().clone();
        if i >= grid.dim() {
            return Err(Error::IndexOutOfRange { what: "riesz", index: i, bound: grid.dim() });
        }
        self.require_mean_free()?;
        Ok(self.multiplied(|idx| {
            let k2 = grid.norm_sq(idx);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, grid.odd_frequency(idx)[i] / math::sqrt(k2))
            }
        }))
    }

    /// `R_i R_j` as the single real multiplier `-ξ_i ξ_j/|ξ|²` (no mean check).
    pub fn riesz_pair_unchecked(&self, i: usize, j: usize) -> Spectrum {
        let grid = self.grid().clone();
        self.scaled_by(|idx| {
            let k2 = grid.norm_sq(idx);
            if k2 == 0.0 {
                0.0
            } else {
                let f = grid.odd_frequency(idx);
                -f[i] * f[j] / k2
            }
        })
    }

    /// Sharp dyadic shell `2^j <= |ξ| < 2^{j+1}`.
    pub fn dyadic(&self, j: usize) -> Spectrum {
        let grid = self.grid().clone();
        self.scaled_by(|idx| if grid.band(idx) == Some(j) { 1.0 } else { 0.0 })
    }
}

/// Spectral gradient of every component: `out[i·n + j] = ∂_j u_i`.
pub fn gradient_spectra(components: &[Spectrum]) -> Vec<Spectrum> {
    let n = components[0].grid().dim();
    components.iter().flat_map(|c| (0..n).map(move |j| c.derivative(j))).collect()
}

/// Divergence of a spectral vector.
pub fn divergence_spectrum(v: &[Spectrum]) -> Spectrum {
    let mut out = Spectrum::zeros(v[0].grid());
    for (axis, c) in v.iter().enumerate() {
        out.add_assign(&c.derivative(axis));
    }
    out
}

/// Leray projection of a spectral vector with the symbol
/// `δ_ab - ξ_a ξ_b / |ξ|²` (odd frequencies); the zero mode is dropped.
pub fn leray_spectra(v: &[Spectrum]) -> Vec<Spectrum> {
    let grid = v[0].grid().clone();
    let n = grid.dim();
    let mut out: Vec<Spectrum> = (0..n).map(|_| Spectrum::zeros(&grid)).collect();
    for idx in 0..grid.len() {
        if idx == 0 {
            continue;
        }
        let f = grid.odd_frequency(idx);
        let k2: f64 = f[..n].iter().map(|x| x * x).sum();
        let mut dot = Complex64::new(0.0, 0.0);
        if k2 > 0.0 {
            for a in 0..n {
                dot += v[a].coeffs()[idx] * f[a];
            }
        }
        for a in 0..n {
            let mut c = v[a].coeffs()[idx];
            if k2 > 0.0 {
                c -= dot * (f[a] / k2);
            }
            out[a].coeffs_mut()[idx] = c;
        }
    }
    out
}

/// Inverse of the gradient on gradients: given `G_ij = ∂_j Y_i`, recovers the
/// mean-free part of `Y` via `Ŷ_i = -Σ_j iξ_j Ĝ_ij / |ξ|²`.
pub fn potential_spectra(g: &[Spectrum]) -> Vec<Spectrum> {
    let grid = g[0].grid().clone();
    let n = grid.dim();
    (0..n)
        .map(|i| {
            let mut div = Spectrum::zeros(&grid);
            for j in 0..n {
                div.add_assign(&g[i * n + j].derivative(j));
            }
            // Δ⁻¹ div, using the odd frequencies so that Nyquist-only modes vanish
            div.scaled_by(|idx| {
                let f = grid.odd_frequency(idx);
                let k2: f64 = f[..n].iter().map(|x| x * x).sum();
                if k2 == 0.0 {
                    0.0
                } else {
                    -1.0 / k2
                }
            })
        })
        .collect()
}

/// `∂_axis u`; the output mean is 0.
pub fn derivative(u: &ScalarField, axis: usize) -> ScalarField {
    u.spectrum().derivative(axis).to_field()
}

/// `Δ⁻¹ u`; rejects `u` with a non-negligible mean.
pub fn inverse_laplacian(u: &ScalarField) -> Result<ScalarField> {
    Ok(u.spectrum().inverse_laplacian()?.to_field())
}

pub fn laplacian(u: &ScalarField) -> ScalarField {
    u.spectrum().laplacian().to_field()
}

/// Riesz transform `R_i u`; rejects `u` with a non-negligible mean.
pub fn riesz(u: &ScalarField, i: usize) -> Result<ScalarField> {
    Ok(u.spectrum().riesz(i)?.to_field())
}

/// `P_j u` for the sharp shell `2^j <= |ξ| < 2^{j+1}`; empty for `j` past the
/// last band.
pub fn dyadic_project(u: &ScalarField, j: usize) -> ScalarField {
    u.spectrum().dyadic(j).to_field()
}

pub fn gradient(u: &ScalarField) -> VectorField {
    let s = u.spectrum();
    let parts: Vec<Spectrum> = (0..u.grid().dim()).map(|a| s.derivative(a)).collect();
    VectorField::from_spectra(u.grid(), &parts).expect("dim components")
}

pub fn divergence(v: &VectorField) -> ScalarField {
    divergence_spectrum(&v.spectra()).to_field()
}

/// Jacobian `G_ij = ∂_j Y_i`.
pub fn jacobian(y: &VectorField) -> MatrixField {
    let g = gradient_spectra(&y.spectra());
    MatrixField::from_spectra(y.grid(), &g).expect("dim² components")
}

/// Leray projector `𝐏 = 1 - Δ⁻¹ ∇ div`; each component must be mean-free.
pub fn leray_project(v: &VectorField) -> Result<VectorField> {
    let spectra = v.spectra();
    for s in &spectra {
        s.require_mean_free()?;
    }
    let out = leray_spectra(&spectra);
    let refs: Vec<&Spectrum> = out.iter().collect();
    VectorField::from_components(v.grid(), fields_of(&refs))
}
