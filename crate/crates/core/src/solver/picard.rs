//! Fixed-point iteration `G ← T[G]` with
//! `T[G] = V(t)(∇𝐏f, ∇𝐏g) + □⁻¹F(G, □G) + RR Σ_{k>=2} E_k(G)`.

use alloc::vec::Vec;

use super::SolverConfig;
use crate::diagnostics::{besov_spectra, BesovSpec};
use crate::hookean::{
    bracket_spectra, checked_minor_sum, compatibility_residuals, curl_free_spectra, null_form_from_bracket,
    require_mean_free_against, InitialData,
};
use crate::spectral::{gradient_spectra, leray_spectra, Field, MatrixField, Spectrum, VectorField};
use crate::wave::{free_wave_spectrum, time_derivatives, DuhamelStream, TimeGrid, TimeSeries};
use crate::{Error, Grid, Result};

/// Compatibility tolerance required before iterating.
const COMPATIBILITY_TOL: f64 = 1e-8;

/// Successive differences this many times the first one count as blow-up.
const BLOW_UP: f64 = 1e6;

/// Jacobian trajectory `G = ∇Y` with `H = □G` and `dG = ∂_t G`.
#[derive(Clone, Debug)]
pub struct PicardState {
    pub g: TimeSeries<MatrixField>,
    pub h: TimeSeries<MatrixField>,
    pub dg: TimeSeries<MatrixField>,
}

struct FreeData {
    displacement: Vec<Spectrum>,
    velocity: Vec<Spectrum>,
}

impl FreeData {
    fn new(data: &InitialData) -> Result<Self> {
        let gs = data.g.spectra();
        for s in &gs {
            s.require_mean_free()?;
        }
        Ok(FreeData {
            displacement: gradient_spectra(&leray_spectra(&data.f.spectra())),
            velocity: gradient_spectra(&leray_spectra(&gs)),
        })
    }

    fn at(&self, t: f64) -> (Vec<Spectrum>, Vec<Spectrum>) {
        self.displacement.iter().zip(&self.velocity).map(|(f, g)| free_wave_spectrum(f, g, t)).unzip()
    }
}

fn to_matrix(grid: &Grid, spectra: &[Spectrum]) -> MatrixField {
    MatrixField::from_spectra(grid, spectra).expect("dim² components")
}

impl PicardState {
    pub fn zeros(grid: &Grid, time: TimeGrid) -> Self {
        let series = TimeSeries::from_fn(time, |_| MatrixField::zeros(grid)).expect("uniform samples");
        PicardState { g: series.clone(), h: series.clone(), dg: series }
    }

    /// Free-wave Jacobian `V(t)(∇𝐏f, ∇𝐏g)` with `H = 0`.
    pub fn free_wave(data: &InitialData, time: TimeGrid) -> Result<Self> {
        let grid = data.grid().clone();
        let free = FreeData::new(data)?;
        let mut g = Vec::with_capacity(time.len());
        let mut dg = Vec::with_capacity(time.len());
        for t in time.times() {
            let (val, rate) = free.at(t);
            g.push(to_matrix(&grid, &val));
            dg.push(to_matrix(&grid, &rate));
        }
        let h = TimeSeries::from_fn(time, |_| MatrixField::zeros(&grid))?;
        Ok(PicardState { g: TimeSeries::new(time, g)?, h, dg: TimeSeries::new(time, dg)? })
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.g.time_grid()
    }

    pub fn grid(&self) -> &Grid {
        self.g.grid()
    }

    fn check(&self) -> Result<()> {
        self.g.check_compatible(&self.h)?;
        self.g.check_compatible(&self.dg)
    }

    /// Mean-free displacement `Y(t_m)`.
    pub fn displacement(&self, m: usize) -> Result<VectorField> {
        let g = self.g.sample(m)?.spectra();
        VectorField::from_spectra(self.grid(), &crate::spectral::potential_spectra(&g))
    }

    /// `∂_t Y(t_m)` recovered from `dG`.
    pub fn velocity(&self, m: usize) -> Result<VectorField> {
        let dg = self.dg.sample(m)?.spectra();
        VectorField::from_spectra(self.grid(), &crate::spectral::potential_spectra(&dg))
    }

    /// `□Y(t_m)` recovered from `H`.
    pub fn box_displacement(&self, m: usize) -> Result<VectorField> {
        let h = self.h.sample(m)?.spectra();
        VectorField::from_spectra(self.grid(), &crate::spectral::potential_spectra(&h))
    }
}

/// `V(t)(∇𝐏f, ∇𝐏g)` and its time derivative at a single time.
pub fn free_wave_jacobian(data: &InitialData, t: f64) -> Result<(MatrixField, MatrixField)> {
    let (val, rate) = FreeData::new(data)?.at(t);
    Ok((to_matrix(data.grid(), &val), to_matrix(data.grid(), &rate)))
}

/// Weighted sum of spectra, `Σ w_i s_i`.
fn combination(series: &[Spectrum], weights: &[(usize, f64)]) -> Spectrum {
    let mut out = Spectrum::zeros(series[0].grid());
    for &(i, w) in weights {
        out.axpy(w.into(), &series[i]);
    }
    out
}

/// One application of the map together with `sup_t ‖T[G] - G‖` and
/// `sup_t ‖T[G]‖` in `Ḃ^{n/2}`.
fn apply(state: &PicardState, free: &FreeData) -> Result<(PicardState, f64, f64)> {
    state.check()?;
    let time = state.time_grid();
    let grid = state.grid().clone();
    let n = grid.dim();
    let spec = BesovSpec::critical(n);

    let mut minors = Vec::with_capacity(time.len());
    for g in state.g.samples() {
        minors.push(checked_minor_sum(&g.spectra())?);
    }

    let mut stream = DuhamelStream::new(&grid, time, n * n);
    let mut g_new = Vec::with_capacity(time.len());
    let mut h_new = Vec::with_capacity(time.len());
    let mut dg_new = Vec::with_capacity(time.len());
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for m in 0..time.len() {
        let gs = state.g.samples()[m].spectra();
        let hs = state.h.samples()[m].spectra();
        require_mean_free_against(&hs, 0.0)?;
        let bracket = bracket_spectra(&gs, &hs);
        let scale = crate::hookean::frobenius_rms(&gs) + crate::hookean::frobenius_rms(&hs);
        require_mean_free_against(&bracket, scale * scale)?;
        let forcing = null_form_from_bracket(&bracket, &grid);
        let (duh, duh_rate) = stream.push(&forcing);
        let (free_val, free_rate) = free.at(time.time(m));

        let curl_free = curl_free_spectra(&minors[m]);
        let (d2, d1) = time_derivatives(&minors, m, time.dt(), |w| combination(&minors, w));
        let mut box_s = d2;
        box_s.axpy((-1.0).into(), &minors[m].laplacian());
        let box_c = curl_free_spectra(&box_s);
        let rate_c = curl_free_spectra(&d1);

        let mut g = Vec::with_capacity(n * n);
        let mut h = Vec::with_capacity(n * n);
        let mut dg = Vec::with_capacity(n * n);
        for c in 0..n * n {
            let mut v = free_val[c].clone();
            v.add_assign(&duh[c]);
            v.add_assign(&curl_free[c]);
            g.push(v);
            let mut b = forcing[c].clone();
            b.add_assign(&box_c[c]);
            h.push(b);
            let mut r = free_rate[c].clone();
            r.add_assign(&duh_rate[c]);
            r.add_assign(&rate_c[c]);
            dg.push(r);
        }
        let delta: Vec<Spectrum> = g.iter().zip(&gs).map(|(a, b)| a.sub(b)).collect();
        diff = diff.max(besov_spectra(&delta, spec));
        norm = norm.max(besov_spectra(&g, spec));
        g_new.push(to_matrix(&grid, &g));
        h_new.push(to_matrix(&grid, &h));
        dg_new.push(to_matrix(&grid, &dg));
    }
    let next = PicardState {
        g: TimeSeries::new(time, g_new)?,
        h: TimeSeries::new(time, h_new)?,
        dg: TimeSeries::new(time, dg_new)?,
    };
    Ok((next, diff, norm))
}

/// `T[state]` for the data `(f, g)`.
pub fn picard_map(state: &PicardState, data: &InitialData) -> Result<PicardState> {
    if !state.grid().same(data.grid()) {
        return Err(Error::GridMismatch);
    }
    let free = FreeData::new(data)?;
    Ok(apply(state, &free)?.0)
}

/// Result of [`picard_solve`]. Non-convergence is reported here, not as an
/// error.
#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub state: PicardState,
    pub iterations: usize,
    /// `d_k / d_{k-1}` where `d_k = sup_t ‖G_k - G_{k-1}‖_{Ḃ^{n/2}}` and
    /// `d_0` is the norm of the free-wave seed.
    pub ratios: Vec<f64>,
    /// `d_0, d_1, …`
    pub differences: Vec<f64>,
    pub converged: bool,
}

/// Step-by-step driver behind [`picard_solve`].
pub struct PicardIteration {
    free: FreeData,
    state: PicardState,
    differences: Vec<f64>,
    tol: f64,
    converged: bool,
    stopped: bool,
}

impl PicardIteration {
    /// Checks compatibility of the data and seeds with the free wave.
    pub fn new(data: &InitialData, cfg: &SolverConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        let time = cfg.time_grid()?;
        if !grid.same(data.grid()) {
            return Err(Error::GridMismatch);
        }
        let r = compatibility_residuals(data)?;
        if !(r.det <= COMPATIBILITY_TOL && r.velocity <= COMPATIBILITY_TOL) {
            return Err(Error::IncompatibleData { det: r.det, velocity: r.velocity, tolerance: COMPATIBILITY_TOL });
        }
        let free = FreeData::new(data)?;
        let state = PicardState::free_wave(data, time)?;
        let spec = BesovSpec::critical(grid.dim());
        let seed = state.g.samples().iter().fold(0.0f64, |m, g| m.max(besov_spectra(&g.spectra(), spec)));
        Ok(PicardIteration { free, state, differences: alloc::vec![seed], tol: cfg.picard_tol, converged: false, stopped: false })
    }

    pub fn state(&self) -> &PicardState {
        &self.state
    }

    pub fn differences(&self) -> &[f64] {
        &self.differences
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.differences
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }

    pub fn iterations(&self) -> usize {
        self.differences.len() - 1
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Whether further steps are pointless (converged or blown up).
    pub fn finished(&self) -> bool {
        self.converged || self.stopped
    }

    /// Applies the map once and returns the new successive difference.
    pub fn step(&mut self) -> Result<f64> {
        let (next, diff, norm) = apply(&self.state, &self.free)?;
        self.state = next;
        self.differences.push(diff);
        if !(diff.is_finite() && norm.is_finite()) || diff > BLOW_UP * self.differences[0].max(f64::MIN_POSITIVE) {
            self.stopped = true;
        } else if diff <= self.tol * norm || (diff == 0.0 && norm == 0.0) {
            self.converged = true;
        }
        Ok(diff)
    }

    pub fn into_outcome(self) -> PicardOutcome {
        let ratios = self.ratios();
        PicardOutcome {
            iterations: self.iterations(),
            ratios,
            differences: self.differences,
            converged: self.converged,
            state: self.state,
        }
    }
}

/// Iterates the map from the free-wave seed until the relative successive
/// difference drops below `picard_tol` or `picard_max_iter` is reached.
pub fn picard_solve(data: &InitialData, cfg: &SolverConfig) -> Result<PicardOutcome> {
    let mut it = PicardIteration::new(data, cfg)?;
    while it.iterations() < cfg.picard_max_iter && !it.finished() {
        it.step()?;
    }
    Ok(it.into_outcome())
}
