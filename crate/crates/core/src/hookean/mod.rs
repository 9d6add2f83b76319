//! Incompressible Hookean elasticity in Lagrangian coordinates.
//!
//! The unknown is the displacement `Y(t, y) = X(t, y) - y` of the flow map
//! `X`. Jacobians follow `G_ij = ∂_j Y_i`, so `∇X = I + G`.

mod data;
mod minors;

use alloc::vec::Vec;

pub use data::{compatibility_residuals, make_shear_data, make_shear_data_with, CompatibilityResiduals, ShearParams};
pub use minors::{determinant, principal_minor_sum, principal_minor_sum_matrix};
pub(crate) use minors::{adjugate_of_shifted, higher_minor_sum};
use minors::minor_sum_spectrum;

use crate::math::sqrt;
use crate::spectral::{leray_spectra, pointwise_grouped, Field, MatrixField, ScalarField, Spectrum, VectorField};
use crate::{Error, Grid, Result};

/// Relative tolerance for the zero-mode and curl checks.
const STRUCTURE_TOL: f64 = 1e-10;

/// A mean-free gradient `G = ∇Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianField(MatrixField);

pub(crate) fn frobenius_rms(spectra: &[Spectrum]) -> f64 {
    sqrt(spectra.iter().map(|s| s.rms() * s.rms()).sum())
}

/// Largest zero mode among components, for checks against a shared scale.
fn max_mean(spectra: &[Spectrum]) -> f64 {
    spectra.iter().fold(0.0, |m, s| m.max(s.coeffs()[0].norm()))
}

pub(crate) fn require_mean_free_against(spectra: &[Spectrum], scale: f64) -> Result<()> {
    let mean = max_mean(spectra);
    let norm = frobenius_rms(spectra).max(scale);
    if mean > STRUCTURE_TOL * norm {
        return Err(Error::NonZeroMean { mean, norm });
    }
    Ok(())
}

/// RMS of `ξ_k Ĝ_ij - ξ_j Ĝ_ik` over all `i` and `j < k`.
fn curl_residual(g: &[Spectrum]) -> f64 {
    let grid = g[0].grid();
    let n = grid.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                let (a, b) = (g[i * n + j].coeffs(), g[i * n + k].coeffs());
                for idx in 0..grid.len() {
                    let f = grid.odd_frequency(idx);
                    acc += (b[idx] * f[j] - a[idx] * f[k]).norm_sqr();
                }
            }
        }
    }
    sqrt(acc)
}

impl JacobianField {
    /// Validates that every component is mean-free and that `G` is a
    /// gradient up to `1e-10·‖G‖`.
    pub fn new(g: MatrixField) -> Result<Self> {
        let spectra = g.spectra();
        Self::validate(&spectra)?;
        Ok(JacobianField(g))
    }

    fn validate(spectra: &[Spectrum]) -> Result<()> {
        require_mean_free_against(spectra, 0.0)?;
        let grid = spectra[0].grid();
        let scale = frobenius_rms(spectra);
        // compare |ξ|·|Ĝ| against |ξ|_max·‖G‖
        let residual = curl_residual(spectra);
        let norm = scale * (grid.points() / 2) as f64;
        if residual > STRUCTURE_TOL * norm {
            return Err(Error::NotAGradient { residual, norm });
        }
        Ok(())
    }

    /// `∇Y` for a displacement `Y` (the mean of `Y` is irrelevant).
    pub fn from_displacement(y: &VectorField) -> Self {
        JacobianField(crate::spectral::jacobian(y))
    }

    pub fn matrix(&self) -> &MatrixField {
        &self.0
    }

    pub fn into_matrix(self) -> MatrixField {
        self.0
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    /// Mean-free displacement whose gradient is `G`.
    pub fn displacement(&self) -> VectorField {
        let p = crate::spectral::potential_spectra(&self.0.spectra());
        VectorField::from_spectra(self.grid(), &p).expect("dim components")
    }
}

/// Displacement and velocity at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub f: VectorField,
    pub g: VectorField,
}

impl InitialData {
    pub fn new(f: VectorField, g: VectorField) -> Result<Self> {
        if !f.grid().same(g.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(InitialData { f, g })
    }

    pub fn zeros(grid: &Grid) -> Self {
        InitialData { f: VectorField::zeros(grid), g: VectorField::zeros(grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }
}

/// Mean-zero pressure.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField(ScalarField);

impl PressureField {
    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }
}

/// `s = Σ_{k>=2} E_k(G)` with the zero-mode guard used by the nonlinear terms.
pub(crate) fn checked_minor_sum(g: &[Spectrum]) -> Result<Spectrum> {
    require_mean_free_against(g, 0.0)?;
    let s = minor_sum_spectrum(g);
    let scale = frobenius_rms(g);
    require_mean_free_against(core::slice::from_ref(&s), scale * scale)?;
    Ok(s)
}

/// `C_ij = R_i R_j s` from the spectrum of `s`.
pub(crate) fn curl_free_spectra(s: &Spectrum) -> Vec<Spectrum> {
    let n = s.grid().dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(s.riesz_pair_unchecked(i, j));
        }
    }
    out
}

/// Curl-free part of the Jacobian, `C_ij = R_i R_j Σ_{k>=2} E_k(G)`.
pub fn curl_free_gradient(g: &JacobianField) -> Result<MatrixField> {
    let spectra = g.matrix().spectra();
    let s = checked_minor_sum(&spectra)?;
    MatrixField::from_spectra(g.grid(), &curl_free_spectra(&s))
}

/// The antisymmetric bracket `B_ik = Σ_l G_li H_lk - H_li G_lk` for `i < k`,
/// dealiased at degree 2, in the order `(0,1), (0,2), (1,2)`.
pub(crate) fn bracket_spectra(g: &[Spectrum], h: &[Spectrum]) -> Vec<Spectrum> {
    let n = g[0].grid().dim();
    let gr: Vec<&Spectrum> = g.iter().collect();
    let hr: Vec<&Spectrum> = h.iter().collect();
    let pairs = n * (n - 1) / 2;
    pointwise_grouped(&[&gr, &hr], 2, pairs, |x, out| {
        let (gm, hm) = x.split_at(n * n);
        let mut p = 0;
        for i in 0..n {
            for k in (i + 1)..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += gm[l * n + i] * hm[l * n + k] - hm[l * n + i] * gm[l * n + k];
                }
                out[p] = acc;
                p += 1;
            }
        }
    })
}

/// `F_ij = Σ_k R_j R_k B_ik` from the bracket spectra.
pub(crate) fn null_form_from_bracket(bracket: &[Spectrum], grid: &Grid) -> Vec<Spectrum> {
    let n = grid.dim();
    let mut out: Vec<Spectrum> = (0..n * n).map(|_| Spectrum::zeros(grid)).collect();
    let mut p = 0;
    for i in 0..n {
        for k in (i + 1)..n {
            let b = &bracket[p];
            p += 1;
            for j in 0..n {
                // B_ik enters row i with +, row k with - (B_ki = -B_ik)
                let term = b.riesz_pair_unchecked(j, k);
                out[i * n + j].add_assign(&term);
                let term = b.riesz_pair_unchecked(j, i);
                out[k * n + j].axpy((-1.0).into(), &term);
            }
        }
    }
    out
}

/// Null-form forcing `F_ij = Σ_k R_j R_k (GᵀH - HᵀG)_ik`: the Jacobian of
/// `-𝐏[(∇Y)ᵀ □Y]` for `G = ∇Y`, `H = □∇Y`.
pub fn null_form(g: &JacobianField, h: &MatrixField) -> Result<MatrixField> {
    if !g.grid().same(h.grid()) {
        return Err(Error::GridMismatch);
    }
    let gs = g.matrix().spectra();
    let hs = h.spectra();
    require_mean_free_against(&gs, 0.0)?;
    require_mean_free_against(&hs, 0.0)?;
    let b = bracket_spectra(&gs, &hs);
    let scale = frobenius_rms(&gs) + frobenius_rms(&hs);
    require_mean_free_against(&b, scale * scale)?;
    MatrixField::from_spectra(g.grid(), &null_form_from_bracket(&b, g.grid()))
}

/// `V = (I + Gᵀ)□Y` with `(Gᵀ□Y)_j = Σ_l G_lj □Y_l`, dealiased at degree 2.
fn pressure_gradient_spectra(g: &[Spectrum], box_y: &[Spectrum]) -> Vec<Spectrum> {
    let n = box_y.len();
    let gr: Vec<&Spectrum> = g.iter().collect();
    let br: Vec<&Spectrum> = box_y.iter().collect();
    let mut v = pointwise_grouped(&[&gr, &br], 2, n, |x, out| {
        let (gm, b) = x.split_at(n * n);
        for j in 0..n {
            out[j] = (0..n).map(|l| gm[l * n + j] * b[l]).sum();
        }
    });
    for (vj, bj) in v.iter_mut().zip(box_y) {
        vj.add_assign(bj);
    }
    v
}

/// Pressure and curl residual from spectra, without input checks.
pub(crate) fn recover_pressure_spectra(g: &[Spectrum], box_y: &[Spectrum]) -> (Spectrum, f64) {
    let v = pressure_gradient_spectra(g, box_y);
    let div = crate::spectral::divergence_spectrum(&v);
    let p = div.inverse_laplacian_unchecked().scaled_by(|_| -1.0);
    let total = frobenius_rms(&v);
    let residual = if total == 0.0 {
        0.0
    } else {
        let solenoidal = frobenius_rms(&leray_spectra(&v));
        let mean = v.iter().map(|s| s.coeffs()[0].norm_sqr()).sum::<f64>();
        sqrt(solenoidal * solenoidal + mean) / total
    };
    (p, residual)
}

/// Pressure from `(I + Gᵀ)□Y = -∇p`: `p = -Δ⁻¹ div[(I + Gᵀ)□Y]`, together
/// with the relative size of the non-gradient part of the right side.
pub fn recover_pressure(g: &JacobianField, box_y: &VectorField) -> Result<(PressureField, f64)> {
    if !g.grid().same(box_y.grid()) {
        return Err(Error::GridMismatch);
    }
    let bs = box_y.spectra();
    require_mean_free_against(&bs, 0.0)?;
    let (p, residual) = recover_pressure_spectra(&g.matrix().spectra(), &bs);
    Ok((PressureField(p.to_field()), residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::spectral::{dealiased_product, gradient, riesz};
    use alloc::vec;

    fn random_displacement(grid: &Grid, seed: u64, scale: f64) -> VectorField {
        let mut r = rng::seeded(seed);
        let comps = (0..grid.dim()).map(|_| rng::random_field(grid, &mut r).scaled(scale)).collect();
        VectorField::new(comps).unwrap()
    }

    #[test]
    fn jacobian_validation() {
        let grid = Grid::new(2, 16).unwrap();
        let y = random_displacement(&grid, 1, 1.0);
        let g = JacobianField::from_displacement(&y);
        assert!(JacobianField::new(g.matrix().clone()).is_ok());
        let mut bad = g.matrix().clone();
        bad.get_mut(0, 1).axpy(1.0, &y.component(0).clone());
        assert!(matches!(JacobianField::new(bad), Err(Error::NotAGradient { .. })));
        let mut shifted = g.matrix().clone();
        shifted.get_mut(1, 1).axpy(1.0, &ScalarField::constant(&grid, 0.5));
        assert!(matches!(JacobianField::new(shifted), Err(Error::NonZeroMean { .. })));
        let back = JacobianField::from_displacement(&g.displacement());
        assert!(back.matrix().difference(g.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn curl_free_gradient_structure() {
        let grid = Grid::new(3, 16).unwrap();
        let zero = JacobianField::from_displacement(&VectorField::zeros(&grid));
        assert_eq!(curl_free_gradient(&zero).unwrap().max_abs(), 0.0);

        let g = JacobianField::from_displacement(&random_displacement(&grid, 2, 0.1));
        let c = curl_free_gradient(&g).unwrap();
        let s: ScalarField = (2..=3).fold(ScalarField::zeros(&grid), |mut acc, k| {
            acc.axpy(1.0, &principal_minor_sum(g.matrix(), k).unwrap());
            acc
        });
        for i in 0..3 {
            for j in 0..3 {
                assert!(c.get(i, j).difference(c.get(j, i)).max_abs() < 1e-12);
            }
        }
        let mut tr = c.trace();
        tr.axpy(1.0, &s);
        assert!(tr.max_abs() < 1e-12);
    }

    #[test]
    fn curl_free_of_shear_vanishes() {
        let grid = Grid::new(2, 16).unwrap();
        let y = VectorField::new(vec![
            ScalarField::from_fn(&grid, |x| libm::sin(x[1])),
            ScalarField::zeros(&grid),
        ])
        .unwrap();
        let g = JacobianField::from_displacement(&y);
        assert!(curl_free_gradient(&g).unwrap().max_abs() < 1e-15);
    }

    fn random_pair(grid: &Grid, seed: u64) -> (JacobianField, MatrixField) {
        let g = JacobianField::from_displacement(&random_displacement(grid, seed, 1.0));
        let h = JacobianField::from_displacement(&random_displacement(grid, seed + 100, 1.0));
        (g, h.into_matrix())
    }

    #[test]
    fn null_form_trivial_cases() {
        let grid = Grid::new(3, 8).unwrap();
        let (g, h) = random_pair(&grid, 4);
        let zero = MatrixField::zeros(&grid);
        assert_eq!(null_form(&g, &zero).unwrap().max_abs(), 0.0);
        assert_eq!(null_form(&g, g.matrix()).unwrap().max_abs(), 0.0);
        assert!(null_form(&g, &h).unwrap().max_abs() > 0.0);
    }

    #[test]
    fn null_form_bilinear() {
        let grid = Grid::new(2, 16).unwrap();
        let (g1, h) = random_pair(&grid, 7);
        let (g2, _) = random_pair(&grid, 8);
        let (a, b) = (0.7, -1.3);
        let mut combo = g1.matrix().zeros_like();
        combo.axpy(a, g1.matrix());
        combo.axpy(b, g2.matrix());
        let lhs = null_form(&JacobianField::new(combo).unwrap(), &h).unwrap();
        let mut rhs = h.zeros_like();
        rhs.axpy(a, &null_form(&g1, &h).unwrap());
        rhs.axpy(b, &null_form(&g2, &h).unwrap());
        assert!(lhs.difference(&rhs).max_abs() < 1e-11 * (1.0 + lhs.max_abs()));
    }

    fn drop_mean(u: &ScalarField) -> ScalarField {
        let mut s = u.spectrum();
        s.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        s.to_field()
    }

    #[test]
    fn null_form_reassociation() {
        for dim in [2usize, 3] {
            let grid = Grid::new(dim, if dim == 2 { 16 } else { 8 }).unwrap();
            let (g, h) = random_pair(&grid, 11 + dim as u64);
            let fast = null_form(&g, &h).unwrap();
            // F_ij = Σ_k Σ_l R_k (R_j (G_li H_lk)) - R_j (R_k (H_li G_lk))
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = ScalarField::zeros(&grid);
                    for k in 0..dim {
                        for l in 0..dim {
                            let p = dealiased_product(&[g.matrix().get(l, i), h.get(l, k)]).unwrap();
                            let q = dealiased_product(&[h.get(l, i), g.matrix().get(l, k)]).unwrap();
                            let p = riesz(&riesz(&drop_mean(&p), j).unwrap(), k).unwrap();
                            let q = riesz(&riesz(&drop_mean(&q), k).unwrap(), j).unwrap();
                            acc.axpy(1.0, &p);
                            acc.axpy(-1.0, &q);
                        }
                    }
                    let scale = 1.0 + fast.max_abs();
                    assert!(fast.get(i, j).difference(&acc).max_abs() < 1e-11 * scale);
                }
            }
        }
    }

    #[test]
    fn pressure_of_gradients() {
        let grid = Grid::new(2, 16).unwrap();
        let zero_g = JacobianField::from_displacement(&VectorField::zeros(&grid));
        let (p, r) = recover_pressure(&zero_g, &VectorField::zeros(&grid)).unwrap();
        assert_eq!(p.field().max_abs(), 0.0);
        assert_eq!(r, 0.0);

        let mut rr = rng::seeded(3);
        let phi = rng::random_field(&grid, &mut rr);
        let (p, r) = recover_pressure(&zero_g, &gradient(&phi)).unwrap();
        assert!(p.field().difference(&phi.scaled(-1.0)).max_abs() < 1e-12);
        assert!(r < 1e-12);
        assert!(recover_pressure(&zero_g, &VectorField::new(vec![
            ScalarField::constant(&grid, 1.0),
            ScalarField::zeros(&grid)
        ]).unwrap()).is_err());
    }
}
