//! Leapfrog stepper for `Y_tt = ΔY - (∇X)^{-T}∇p` with the pressure fixed by
//! `∂_t² det ∇X = 0`:
//! `tr(A ∇(Aᵀ∇p)) = tr(A ∇ΔY) - tr(A ∇Y_t A ∇Y_t)`, `A = (∇X)⁻¹`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::picard::picard_solve;
use super::SolverConfig;
use crate::hookean::{adjugate_of_shifted, determinant, InitialData};
use crate::math::sqrt;
use crate::spectral::{gradient_spectra, lift, project, Field, MatrixField, Padding, ScalarField, Spectrum, VectorField};
use crate::{Error, Grid, Result};

/// Deviation of `det ∇X` from 1 beyond which the stepper refuses to go on.
const SINGULAR_GAP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureSettings {
    /// Relative residual target of the pressure iteration.
    pub tol: f64,
    pub max_iter: usize,
}

/// `A = (I + G)⁻¹` sampled on the padded grid.
struct Coefficients {
    grid: Grid,
    pad: Arc<Padding>,
    inv: Vec<Vec<f64>>,
}

impl Coefficients {
    fn new(g: &[Spectrum]) -> Result<Self> {
        let grid = g[0].grid().clone();
        let n = grid.dim();
        let pad = grid.padding(2);
        let refs: Vec<&Spectrum> = g.iter().collect();
        let lifted = lift(&refs, &pad);
        let mut inv = alloc::vec![alloc::vec![0.0; pad.points().pow(n as u32)]; n * n];
        let mut a = [0.0; 9];
        let mut m = [0.0; 9];
        let mut adj = [0.0; 9];
        for p in 0..inv[0].len() {
            for (c, col) in lifted.iter().enumerate() {
                a[c] = col[p];
                m[c] = col[p] + if c % (n + 1) == 0 { 1.0 } else { 0.0 };
            }
            let det = determinant(&m[..n * n], n);
            if !((det - 1.0).abs() <= SINGULAR_GAP) {
                return Err(Error::SingularJacobian { index: p, det });
            }
            adjugate_of_shifted(&a[..n * n], n, &mut adj);
            for c in 0..n * n {
                inv[c][p] = adj[c] / det;
            }
        }
        Ok(Coefficients { grid, pad, inv })
    }

    fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `(Aᵀ u)_i = Σ_k A_ki u_k`
    fn transpose_apply(&self, u: &[Spectrum]) -> Vec<Spectrum> {
        let n = self.dim();
        let refs: Vec<&Spectrum> = u.iter().collect();
        let lifted = lift(&refs, &self.pad);
        let len = lifted[0].len();
        let out: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..len).map(|p| (0..n).map(|k| self.inv[k * n + i][p] * lifted[k][p]).sum()).collect())
            .collect();
        let refs: Vec<&[f64]> = out.iter().map(|v| v.as_slice()).collect();
        project(&refs, &self.pad, &self.grid)
    }

    /// `tr(A K) = Σ_ij A_ij K_ji` for `K` given row-major.
    fn trace_with(&self, k: &[Spectrum]) -> Spectrum {
        let n = self.dim();
        let refs: Vec<&Spectrum> = k.iter().collect();
        let lifted = lift(&refs, &self.pad);
        let len = lifted[0].len();
        let out: Vec<f64> = (0..len)
            .map(|p| {
                let mut t = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        t += self.inv[i * n + j][p] * lifted[j * n + i][p];
                    }
                }
                t
            })
            .collect();
        project(&[&out], &self.pad, &self.grid).pop().expect("one output")
    }

    /// `tr(A L) - tr(A K A K)`
    fn pressure_source(&self, l: &[Spectrum], k: &[Spectrum]) -> Spectrum {
        let n = self.dim();
        let refs: Vec<&Spectrum> = l.iter().chain(k).collect();
        let lifted = lift(&refs, &self.pad);
        let (ll, kk) = lifted.split_at(n * n);
        let len = ll[0].len();
        let mut ak = [0.0; 9];
        let out: Vec<f64> = (0..len)
            .map(|p| {
                let mut t = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        t += self.inv[i * n + j][p] * ll[j * n + i][p];
                    }
                }
                for i in 0..n {
                    for l in 0..n {
                        ak[i * n + l] = (0..n).map(|j| self.inv[i * n + j][p] * kk[j * n + l][p]).sum();
                    }
                }
                let mut q = 0.0;
                for i in 0..n {
                    for l in 0..n {
                        q += ak[i * n + l] * ak[l * n + i];
                    }
                }
                t - q
            })
            .collect();
        project(&[&out], &self.pad, &self.grid).pop().expect("one output")
    }

    /// `L p = tr(A ∇(Aᵀ∇p))` and the flux `Aᵀ∇p`.
    fn operator(&self, p: &Spectrum) -> (Spectrum, Vec<Spectrum>) {
        let n = self.dim();
        let grad: Vec<Spectrum> = (0..n).map(|a| p.derivative(a)).collect();
        let flux = self.transpose_apply(&grad);
        (self.trace_with(&gradient_spectra(&flux)), flux)
    }
}

fn rms_without_mean(s: &Spectrum) -> f64 {
    sqrt(s.coeffs()[1..].iter().map(|c| c.norm_sqr()).sum())
}

struct Acceleration {
    value: Vec<Spectrum>,
    pressure: Spectrum,
    iterations: usize,
}

/// Solves for the pressure by Richardson iteration preconditioned with `Δ⁻¹`
/// and returns `a = ΔY - Aᵀ∇p`.
fn acceleration(y: &[Spectrum], v: &[Spectrum], guess: &Spectrum, settings: PressureSettings) -> Result<Acceleration> {
    let coeff = Coefficients::new(&gradient_spectra(y))?;
    let lap: Vec<Spectrum> = y.iter().map(|c| c.laplacian()).collect();
    let rhs = coeff.pressure_source(&gradient_spectra(&lap), &gradient_spectra(v));
    let target = rms_without_mean(&rhs);
    let finish = |flux: Vec<Spectrum>, pressure: Spectrum, iterations| {
        let value = lap.iter().zip(&flux).map(|(l, f)| l.sub(f)).collect();
        Acceleration { value, pressure, iterations }
    };
    if target == 0.0 {
        let zero = Spectrum::zeros(guess.grid());
        return Ok(finish(y.iter().map(|c| Spectrum::zeros(c.grid())).collect(), zero, 0));
    }
    let mut p = guess.clone();
    p.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for it in 0.. {
        let (lp, flux) = coeff.operator(&p);
        let mut r = rhs.sub(&lp);
        r.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        let res = rms_without_mean(&r);
        if res <= settings.tol * target {
            return Ok(finish(flux, p, it));
        }
        if it >= settings.max_iter || !res.is_finite() {
            return Err(Error::PressureDiverged { iterations: it, residual: res / target, contraction: res / last });
        }
        last = res;
        p.add_assign(&r.inverse_laplacian_unchecked());
    }
    unreachable!()
}

/// Current and previous displacement of the leapfrog scheme.
#[derive(Clone, Debug)]
pub struct DirectState {
    pub y: VectorField,
    /// Second-order backward difference of `Y` (exact at step 0).
    pub velocity: VectorField,
    pub acceleration: VectorField,
    pub pressure: ScalarField,
    pub pressure_iterations: usize,
    prev: VectorField,
    step: usize,
    dt: f64,
}

impl DirectState {
    /// State at `t = 0`; `Y^{-1}` comes from the Taylor expansion
    /// `f - dt·g + dt²/2·a(0)`.
    pub fn initial(data: &InitialData, dt: f64, settings: PressureSettings) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTimeGrid { dt, steps: 0 });
        }
        let grid = data.grid().clone();
        let ys = data.f.spectra();
        let vs = data.g.spectra();
        let acc = acceleration(&ys, &vs, &Spectrum::zeros(&grid), settings)?;
        let a = VectorField::from_spectra(&grid, &acc.value)?;
        let mut prev = data.f.clone();
        prev.axpy(-dt, &data.g);
        prev.axpy(0.5 * dt * dt, &a);
        Ok(DirectState {
            y: data.f.clone(),
            velocity: data.g.clone(),
            acceleration: a,
            pressure: acc.pressure.to_field(),
            pressure_iterations: acc.iterations,
            prev,
            step: 0,
            dt,
        })
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn jacobian(&self) -> MatrixField {
        crate::spectral::jacobian(&self.y)
    }

    /// `□Y = a - ΔY = -Aᵀ∇p`
    pub fn box_displacement(&self) -> VectorField {
        let lap: Vec<Spectrum> = self.y.spectra().iter().map(|c| c.laplacian()).collect();
        let a = self.acceleration.spectra();
        let b: Vec<Spectrum> = a.iter().zip(&lap).map(|(x, l)| x.sub(l)).collect();
        VectorField::from_spectra(self.y.grid(), &b).expect("dim components")
    }
}

/// Advances one leapfrog step `Y^{m+1} = 2Y^m - Y^{m-1} + dt² a^m` and solves
/// for the new pressure, warm-started from the old one.
pub fn direct_step(state: &DirectState, settings: PressureSettings) -> Result<DirectState> {
    let dt = state.dt;
    let grid = state.y.grid().clone();
    let mut next = state.y.zeros_like();
    next.axpy(2.0, &state.y);
    next.axpy(-1.0, &state.prev);
    next.axpy(dt * dt, &state.acceleration);
    let mut velocity = next.zeros_like();
    velocity.axpy(1.5 / dt, &next);
    velocity.axpy(-2.0 / dt, &state.y);
    velocity.axpy(0.5 / dt, &state.prev);
    let acc = acceleration(&next.spectra(), &velocity.spectra(), &state.pressure.spectrum(), settings)?;
    Ok(DirectState {
        acceleration: VectorField::from_spectra(&grid, &acc.value)?,
        pressure: acc.pressure.to_field(),
        pressure_iterations: acc.iterations,
        prev: state.y.clone(),
        y: next,
        velocity,
        step: state.step + 1,
        dt,
    })
}

/// Runs the stepper over the configured time grid, calling `observe` at
/// every sample including `t = 0`.
pub fn direct_run(
    data: &InitialData,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&DirectState) -> Result<()>,
) -> Result<DirectState> {
    let time = cfg.time_grid()?;
    let mut state = DirectState::initial(data, time.dt(), cfg.pressure())?;
    observe(&state)?;
    for _ in 0..time.steps() {
        state = direct_step(&state, cfg.pressure())?;
        observe(&state)?;
    }
    Ok(state)
}

/// Picard against the direct stepper on the same data and time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    /// `sup_t ‖G_direct - G_picard‖ / sup_t ‖G_picard‖` in `L²`.
    pub relative_difference: f64,
    pub absolute_difference: f64,
    pub picard_iterations: usize,
    pub picard_converged: bool,
}

pub fn cross_validate(data: &InitialData, cfg: &SolverConfig) -> Result<CrossValidation> {
    let picard = picard_solve(data, cfg)?;
    let reference = picard.state.g.samples();
    let scale = reference.iter().fold(0.0f64, |m, g| m.max(g.l2_norm()));
    let mut worst = 0.0f64;
    direct_run(data, cfg, |s| {
        let diff = s.jacobian().difference(&reference[s.step()]).l2_norm();
        worst = worst.max(diff);
        Ok(())
    })?;
    Ok(CrossValidation {
        relative_difference: if scale > 0.0 { worst / scale } else { worst },
        absolute_difference: worst,
        picard_iterations: picard.iterations,
        picard_converged: picard.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hookean::make_shear_data;
    use crate::math::sin;

    const SETTINGS: PressureSettings = PressureSettings { tol: 1e-12, max_iter: 100 };

    #[test]
    fn shear_velocity_needs_no_pressure() {
        let grid = Grid::new(2, 16).unwrap();
        let v = VectorField::new(alloc::vec![
            ScalarField::from_fn(&grid, |x| 0.01 * sin(x[1])),
            ScalarField::zeros(&grid),
        ])
        .unwrap();
        let data = InitialData::new(VectorField::zeros(&grid), v).unwrap();
        let s = DirectState::initial(&data, 0.01, SETTINGS).unwrap();
        assert!(s.pressure.max_abs() < 1e-12);
        assert!(s.acceleration.max_abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = SolverConfig::new(2, 16, 0.0, 0.1, 0.025);
        let grid = cfg.grid().unwrap();
        let out = cross_validate(&InitialData::zeros(&grid), &cfg).unwrap();
        assert_eq!(out.relative_difference, 0.0);
    }

    #[test]
    fn pressure_iteration_reports_failure() {
        let grid = Grid::new(2, 16).unwrap();
        let data = make_shear_data(&grid, 0.05, 2);
        let tight = PressureSettings { tol: 1e-14, max_iter: 1 };
        assert!(matches!(DirectState::initial(&data, 0.01, tight), Err(Error::PressureDiverged { .. })));
    }

    #[test]
    fn steps_keep_volume() {
        let cfg = SolverConfig::new(2, 16, 0.01, 0.5, 0.01);
        let grid = cfg.grid().unwrap();
        let data = make_shear_data(&grid, 0.01, 4);
        let mut worst = 0.0f64;
        direct_run(&data, &cfg, |s| {
            worst = worst.max(crate::diagnostics::det_residual(&s.jacobian()));
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-6, "{worst}");
    }
}
