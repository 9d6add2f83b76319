//! Compatible initial data and the compatibility residuals.

use alloc::vec;
use alloc::vec::Vec;

use super::minors::{adjugate_of_shifted, higher_minor_sum};
use super::InitialData;
use crate::math::{cos, sin, sqrt};
use crate::rng::{self, SimRng};
use crate::spectral::{gradient_spectra, pointwise_grouped, Field, ScalarField, Spectrum, VectorField};
use crate::{Error, Grid, Result};

/// Max-norm residuals of the two constraints on `(f, g)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompatibilityResiduals {
    /// `max |det(I + ∇f) - 1|`
    pub det: f64,
    /// `max |tr(adj(I + ∇f) ∇g)|`, i.e. `d/dt det ∇X` at `t = 0`.
    pub velocity: f64,
    /// `max |tr(adj(I + ∇f)ᵀ ∇g)|`, the transposed variant.
    pub velocity_transposed: f64,
}

/// `det ∇X` below this at a grid point means the map folds over.
const FOLD_THRESHOLD: f64 = -1e-12;

/// Residuals of `det(I + ∇f) = 1` and of its time derivative along `g`.
/// The velocity residual uses the adjugate, so no inverse is formed; a grid
/// point where `det ∇X` is negative is reported as singular.
pub fn compatibility_residuals(data: &InitialData) -> Result<CompatibilityResiduals> {
    let grid = data.grid().clone();
    let n = grid.dim();
    let j = gradient_spectra(&data.f.spectra());
    let k = gradient_spectra(&data.g.spectra());
    let jr: Vec<&Spectrum> = j.iter().collect();
    let kr: Vec<&Spectrum> = k.iter().collect();
    let out = pointwise_grouped(&[&jr, &kr], n, 3, |x, o| {
        let (a, b) = x.split_at(n * n);
        let mut adj = [0.0; 9];
        adjugate_of_shifted(a, n, &mut adj);
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        o[0] = trace + higher_minor_sum(a, n);
        let (mut plain, mut transposed) = (0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                plain += adj[r * n + c] * b[c * n + r];
                transposed += adj[c * n + r] * b[c * n + r];
            }
        }
        o[1] = plain;
        o[2] = transposed;
    });
    let det = out[0].to_field();
    for (index, v) in det.values().iter().enumerate() {
        if !(1.0 + v >= FOLD_THRESHOLD) {
            return Err(Error::SingularJacobian { index, det: 1.0 + v });
        }
    }
    Ok(CompatibilityResiduals {
        det: det.max_abs(),
        velocity: out[1].to_field().max_abs(),
        velocity_transposed: out[2].to_field().max_abs(),
    })
}

/// Shape of the random shear data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShearParams {
    /// Number of composed shears; axis `s mod n` is sheared by shear `s`.
    pub shears: usize,
    /// Wavenumber cutoff: profiles use modes with `1 <= |ξ| <= max_mode`.
    pub max_mode: f64,
}

impl ShearParams {
    pub fn for_dim(dim: usize) -> Self {
        ShearParams { shears: dim, max_mode: 2.0 }
    }
}

/// Real trigonometric polynomial `Σ a·cos(k·x) + b·sin(k·x)` with vector
/// coefficients.
struct Trig {
    modes: Vec<([f64; 3], [f64; 3], [f64; 3])>,
}

impl Trig {
    fn eval(&self, x: &[f64; 3], dim: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (k, a, b) in &self.modes {
            let phase: f64 = (0..dim).map(|d| k[d] * x[d]).sum();
            let (c, s) = (cos(phase), sin(phase));
            for (d, o) in out.iter_mut().enumerate() {
                *o += a[d] * c + b[d] * s;
            }
        }
    }

    /// `max_x |∇ self_0(x)|` over grid points.
    fn max_gradient(&self, grid: &Grid) -> f64 {
        let n = grid.dim();
        let mut best = 0.0f64;
        for idx in 0..grid.len() {
            let x = grid.coordinates(idx);
            let mut g = [0.0; 3];
            for (k, a, b) in &self.modes {
                let phase: f64 = (0..n).map(|d| k[d] * x[d]).sum();
                let w = b[0] * cos(phase) - a[0] * sin(phase);
                for d in 0..n {
                    g[d] += w * k[d];
                }
            }
            best = best.max(sqrt(g.iter().map(|v| v * v).sum()));
        }
        best
    }

    fn max_norm(&self, grid: &Grid) -> f64 {
        let n = grid.dim();
        let mut v = [0.0; 3];
        let mut best = 0.0f64;
        for idx in 0..grid.len() {
            self.eval(&grid.coordinates(idx), n, &mut v[..n]);
            best = best.max(sqrt(v[..n].iter().map(|c| c * c).sum()));
        }
        best
    }

    fn scale(&mut self, s: f64) {
        for (_, a, b) in &mut self.modes {
            a.iter_mut().chain(b.iter_mut()).for_each(|c| *c *= s);
        }
    }
}

/// Integer vectors with `1 <= |k| <= max_mode`, one from each `±k` pair,
/// with `k[skip] = 0` when `skip` is given.
fn half_lattice(dim: usize, max_mode: f64, skip: Option<usize>) -> Vec<[f64; 3]> {
    let r = max_mode as i64;
    let mut out = Vec::new();
    let side = (2 * r + 1) as usize;
    for code in 0..side.pow(dim as u32) {
        let mut k = [0.0; 3];
        let mut c = code;
        for slot in k.iter_mut().take(dim) {
            *slot = (c % side) as f64 - r as f64;
            c /= side;
        }
        if skip.is_some_and(|a| k[a] != 0.0) {
            continue;
        }
        let norm = sqrt(k.iter().map(|v| v * v).sum());
        if !(1.0..=max_mode).contains(&norm) {
            continue;
        }
        let leading = k.iter().copied().find(|v| *v != 0.0).unwrap_or(0.0);
        if leading > 0.0 {
            out.push(k);
        }
    }
    out
}

fn random_profile(dim: usize, axis: usize, max_mode: f64, rng: &mut SimRng) -> Trig {
    let modes = half_lattice(dim, max_mode, Some(axis))
        .into_iter()
        .map(|k| {
            let a = [rng::symmetric(rng), 0.0, 0.0];
            let b = [rng::symmetric(rng), 0.0, 0.0];
            (k, a, b)
        })
        .collect();
    Trig { modes }
}

fn random_solenoidal(dim: usize, max_mode: f64, rng: &mut SimRng) -> Trig {
    let modes = half_lattice(dim, max_mode, None)
        .into_iter()
        .map(|k| {
            let k2: f64 = k.iter().map(|v| v * v).sum();
            let mut draw = || {
                let mut c = [0.0; 3];
                for slot in c.iter_mut().take(dim) {
                    *slot = rng::symmetric(rng);
                }
                let dot: f64 = (0..dim).map(|d| c[d] * k[d]).sum();
                for d in 0..dim {
                    c[d] -= dot * k[d] / k2;
                }
                c
            };
            let a = draw();
            let b = draw();
            (k, a, b)
        })
        .collect();
    Trig { modes }
}

/// [`make_shear_data_with`] using `n` shears with profiles of wavenumber at
/// most 2.
pub fn make_shear_data(grid: &Grid, amplitude: f64, seed: u64) -> InitialData {
    make_shear_data_with(grid, amplitude, seed, &ShearParams::for_dim(grid.dim()))
}

/// Exactly volume-preserving initial data.
///
/// `X = S_m ∘ … ∘ S_1` where `S_s` shifts coordinate `a = s mod n` by
/// `ε φ_s` of the other coordinates (`max |∇φ_s| = 1`), so every factor has
/// unit Jacobian determinant; `f = X(y) - y` and `g = ε v(X(y))` with `v`
/// divergence-free and `max |v| = 1`. Both are evaluated exactly at the
/// shifted points and made mean-free.
pub fn make_shear_data_with(grid: &Grid, amplitude: f64, seed: u64, params: &ShearParams) -> InitialData {
    let n = grid.dim();
    let mut rng = rng::seeded(seed);
    let profiles: Vec<(usize, Trig)> = (0..params.shears)
        .map(|s| {
            let axis = s % n;
            let mut p = random_profile(n, axis, params.max_mode, &mut rng);
            let m = p.max_gradient(grid);
            p.scale(1.0 / m);
            (axis, p)
        })
        .collect();
    let mut velocity = random_solenoidal(n, params.max_mode, &mut rng);
    let m = velocity.max_norm(grid);
    velocity.scale(amplitude / m);

    let mut f: Vec<Vec<f64>> = vec![vec![0.0; grid.len()]; n];
    let mut g: Vec<Vec<f64>> = vec![vec![0.0; grid.len()]; n];
    let mut shift = [0.0; 3];
    let mut v = [0.0; 3];
    for idx in 0..grid.len() {
        let y = grid.coordinates(idx);
        let mut z = y;
        for (axis, p) in &profiles {
            p.eval(&z, n, &mut shift[..1]);
            z[*axis] += amplitude * shift[0];
        }
        velocity.eval(&z, n, &mut v[..n]);
        for d in 0..n {
            f[d][idx] = z[d] - y[d];
            g[d][idx] = v[d];
        }
    }
    let to_field = |values: Vec<Vec<f64>>| {
        let comps = values
            .into_iter()
            .map(|c| {
                let mut u = ScalarField::from_values(grid, c).expect("grid length");
                let mean = u.mean();
                u.values_mut().iter_mut().for_each(|x| *x -= mean);
                u
            })
            .collect();
        VectorField::from_components(grid, comps).expect("dim components")
    };
    InitialData { f: to_field(f), g: to_field(g) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::divergence;

    #[test]
    fn zero_amplitude_is_exact() {
        let grid = Grid::new(2, 16).unwrap();
        let d = make_shear_data(&grid, 0.0, 3);
        assert_eq!(d.f.max_abs(), 0.0);
        assert_eq!(d.g.max_abs(), 0.0);
        let r = compatibility_residuals(&d).unwrap();
        assert_eq!((r.det, r.velocity), (0.0, 0.0));
    }

    #[test]
    fn residual_of_sine_displacement() {
        let grid = Grid::new(2, 16).unwrap();
        let f = VectorField::new(vec![
            ScalarField::from_fn(&grid, |x| sin(x[0]) * 0.4),
            ScalarField::zeros(&grid),
        ])
        .unwrap();
        let d = InitialData::new(f, VectorField::zeros(&grid)).unwrap();
        let r = compatibility_residuals(&d).unwrap();
        assert!((r.det - 0.4).abs() < 1e-14);

        // det = 1 + cos y₁ touches 0 but does not fold
        let f = VectorField::new(vec![
            ScalarField::from_fn(&grid, |x| sin(x[0])),
            ScalarField::zeros(&grid),
        ])
        .unwrap();
        let d = InitialData::new(f, VectorField::zeros(&grid)).unwrap();
        let r = compatibility_residuals(&d).unwrap();
        assert!((r.det - 1.0).abs() < 1e-14);

        let f = VectorField::new(vec![
            ScalarField::from_fn(&grid, |x| 1.5 * sin(x[0])),
            ScalarField::zeros(&grid),
        ])
        .unwrap();
        let d = InitialData::new(f, VectorField::zeros(&grid)).unwrap();
        assert!(matches!(compatibility_residuals(&d), Err(Error::SingularJacobian { .. })));
    }

    #[test]
    fn shear_data_is_compatible() {
        let grid = Grid::new(2, 32).unwrap();
        let params = ShearParams { shears: 1, max_mode: 2.0 };
        let d = make_shear_data_with(&grid, 0.1, 5, &params);
        let r = compatibility_residuals(&d).unwrap();
        assert!(r.det <= 1e-12 && r.velocity <= 1e-10, "{r:?}");

        let grid = Grid::new(3, 16).unwrap();
        let params = ShearParams { shears: 3, max_mode: 2.0 };
        let d = make_shear_data_with(&grid, 0.05, 6, &params);
        let r = compatibility_residuals(&d).unwrap();
        assert!(r.det <= 1e-10 && r.velocity <= 1e-9, "{r:?}");
    }

    #[test]
    fn velocity_field_is_solenoidal_at_zero_displacement() {
        let grid = Grid::new(3, 16).unwrap();
        let params = ShearParams { shears: 0, max_mode: 2.0 };
        let d = make_shear_data_with(&grid, 0.3, 1, &params);
        assert_eq!(d.f.max_abs(), 0.0);
        let speed = (0..grid.len())
            .map(|i| sqrt((0..3).map(|a| d.g.component(a).values()[i].powi(2)).sum()))
            .fold(0.0, f64::max);
        assert!((speed - 0.3).abs() < 1e-12);
        assert!(divergence(&d.g).max_abs() < 1e-13);
    }
}
