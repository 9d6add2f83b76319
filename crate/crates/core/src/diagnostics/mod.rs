//! Function-space diagnostics: dyadic Besov norms, energy, constraint
//! residuals, 2-variation of sampled paths and sweep analytics.

mod sweep;
mod variation;

use alloc::vec::Vec;

pub use sweep::{loglog_slope, sweep_report, SweepRow, SweepRun, SweepTable};
pub use variation::{s_surrogate, two_variation, SSurrogate, SampledPath};

use crate::hookean::{higher_minor_sum, recover_pressure_spectra};
use crate::math::{band_weight, sqrt};
use crate::solver::{DirectState, PicardOutcome, PicardState};
use crate::spectral::{pointwise, Field, MatrixField, Spectrum, VectorField};
use crate::Result;

/// Regularity exponent of a homogeneous `Ḃ^s_{2,1}` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovSpec {
    pub s: f64,
}

impl BesovSpec {
    pub fn new(s: f64) -> Self {
        BesovSpec { s }
    }

    /// `Ḃ^{n/2}` for solutions.
    pub fn critical(dim: usize) -> Self {
        BesovSpec { s: dim as f64 / 2.0 }
    }
}

/// Per-band `L²` norms `‖P_j u‖` (Frobenius over components).
pub fn band_norms(spectra: &[Spectrum]) -> Vec<f64> {
    let grid = spectra[0].grid();
    let mut acc = alloc::vec![0.0; grid.band_count()];
    for s in spectra {
        for (idx, c) in s.coeffs().iter().enumerate() {
            if let Some(j) = grid.band(idx) {
                acc[j] += c.norm_sqr();
            }
        }
    }
    let vol = grid.volume();
    acc.into_iter().map(|a| sqrt(a * vol)).collect()
}

/// `Σ_j 2^{js} ‖P_j u‖_{L²}` from spectra; the zero mode is ignored.
pub fn besov_spectra(spectra: &[Spectrum], spec: BesovSpec) -> f64 {
    band_norms(spectra).iter().enumerate().map(|(j, b)| band_weight(j, spec.s) * b).sum()
}

/// `Σ_j 2^{js} ‖P_j u‖_{L²}` over the grid's dyadic shells.
pub fn besov_norm<F: Field>(u: &F, spec: BesovSpec) -> f64 {
    besov_spectra(&u.spectra(), spec)
}

/// `½‖Y_t‖² + ½‖G‖²`.
pub fn energy(velocity: &VectorField, g: &MatrixField) -> f64 {
    let v = velocity.l2_norm();
    let gn = g.l2_norm();
    0.5 * v * v + 0.5 * gn * gn
}

/// `max_x |det(I + G) - 1|` with `det(I + G) - 1 = tr G + Σ_{k>=2} E_k(G)`
/// dealiased at degree `n`.
pub fn det_residual_spectra(g: &[Spectrum]) -> f64 {
    let n = g[0].grid().dim();
    let refs: Vec<&Spectrum> = g.iter().collect();
    let out = pointwise(&refs, n, 1, |a, o| {
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        o[0] = trace + higher_minor_sum(a, n);
    });
    out[0].to_field().max_abs()
}

pub fn det_residual(g: &MatrixField) -> f64 {
    det_residual_spectra(&g.spectra())
}

/// One time sample of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub besov_g: f64,
    pub besov_dg: f64,
    pub energy: f64,
    pub det_residual: f64,
    pub pressure_curl_residual: f64,
}

/// Per-sample rows plus per-run quantities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsReport {
    pub rows: Vec<DiagnosticsRow>,
    /// Successive-difference ratios of the Picard iteration (empty for the
    /// direct stepper).
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub s_surrogate: Option<SSurrogate>,
}

impl DiagnosticsReport {
    pub fn sup_besov_g(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.besov_g))
    }

    pub fn max_det_residual(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.det_residual))
    }
}

fn row(t: f64, g: &MatrixField, dg: &MatrixField, velocity: &VectorField, box_y: &VectorField) -> DiagnosticsRow {
    let dim = g.dim();
    let gs = g.spectra();
    DiagnosticsRow {
        t,
        besov_g: besov_spectra(&gs, BesovSpec::critical(dim)),
        besov_dg: besov_norm(dg, BesovSpec::new(dim as f64 / 2.0 - 1.0)),
        energy: energy(velocity, g),
        det_residual: det_residual_spectra(&gs),
        pressure_curl_residual: recover_pressure_spectra(&gs, &box_y.spectra()).1,
    }
}

/// Row for sample `m` of a Picard trajectory.
pub fn picard_row(state: &PicardState, m: usize) -> Result<DiagnosticsRow> {
    let t = state.time_grid().time(m);
    let (g, dg) = (state.g.sample(m)?, state.dg.sample(m)?);
    Ok(row(t, g, dg, &state.velocity(m)?, &state.box_displacement(m)?))
}

/// Rows every `cadence` samples (and at the last one).
pub fn picard_report(outcome: &PicardOutcome, cadence: usize, surrogate: bool) -> Result<DiagnosticsReport> {
    let len = outcome.state.time_grid().len();
    let mut rows = Vec::new();
    for m in (0..len).filter(|&m| m % cadence.max(1) == 0 || m + 1 == len) {
        rows.push(picard_row(&outcome.state, m)?);
    }
    let dim = outcome.state.grid().dim();
    Ok(DiagnosticsReport {
        rows,
        ratios: outcome.ratios.clone(),
        iterations: outcome.iterations,
        converged: outcome.converged,
        s_surrogate: surrogate.then(|| s_surrogate(&outcome.state, BesovSpec::critical(dim))),
    })
}

/// Row for the current state of the direct stepper.
pub fn direct_row(state: &DirectState) -> DiagnosticsRow {
    let dg = crate::spectral::jacobian(&state.velocity);
    row(state.time(), &state.jacobian(), &dg, &state.velocity, &state.box_displacement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::spectral::{dyadic_project, ScalarField};
    use crate::Grid;

    #[test]
    fn single_band_and_additivity() {
        let grid = Grid::new(2, 32).unwrap();
        let mut r = rng::seeded(2);
        let u = rng::random_field(&grid, &mut r);
        let spec = BesovSpec::new(1.0);
        let mut total = 0.0;
        let mut sum = ScalarField::zeros(&grid);
        for j in 0..grid.band_count() {
            let p = dyadic_project(&u, j);
            let b = besov_norm(&p, spec);
            let expect = band_weight(j, 1.0) * p.l2_norm();
            assert!((b - expect).abs() <= 1e-12 * expect.max(1e-300));
            total += b;
            sum.axpy(1.0, &p);
        }
        assert!((besov_norm(&u, spec) - total).abs() < 1e-12 * total);

        let zero = BesovSpec::new(0.0);
        assert!(besov_norm(&u, zero) >= u.l2_norm() * (1.0 - 1e-14));
        let single = dyadic_project(&u, 2);
        assert!((besov_norm(&single, zero) - single.l2_norm()).abs() < 1e-12 * single.l2_norm());
    }

    #[test]
    fn zero_state_energy() {
        let grid = Grid::new(2, 8).unwrap();
        assert_eq!(energy(&VectorField::zeros(&grid), &MatrixField::zeros(&grid)), 0.0);
        assert_eq!(det_residual(&MatrixField::zeros(&grid)), 0.0);
    }
}
