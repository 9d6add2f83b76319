//! Linear wave propagation on the torus: the exact free-wave group, the
//! Duhamel integral by trapezoidal quadrature and a discrete d'Alembertian.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{self, cis, cos, sin, sqrt};
use crate::spectral::{Field, Spectrum};
use crate::{Error, Grid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform samples `t_m = m·dt`, `m = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || steps < 4 {
            return Err(Error::InvalidTimeGrid { dt, steps });
        }
        Ok(TimeGrid { dt, steps })
    }

    /// Grid reaching `t_end`, which must be an integer multiple of `dt`.
    pub fn from_horizon(t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidTimeGrid { dt, steps: 0 });
        }
        let steps = math::round(t_end / dt);
        if (steps * dt - t_end).abs() > 1e-9 * t_end {
            return Err(Error::InvalidTimeGrid { dt, steps: steps as usize });
        }
        Self::new(dt, steps as usize)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of samples, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|m| self.time(m))
    }
}

/// One field per sample of a [`TimeGrid`], all on the same grid.
#[derive(Clone, Debug)]
pub struct TimeSeries<F> {
    time: TimeGrid,
    samples: Vec<F>,
}

impl<F: Field> TimeSeries<F> {
    pub fn new(time: TimeGrid, samples: Vec<F>) -> Result<Self> {
        if samples.len() != time.len() {
            return Err(Error::ShapeMismatch { expected: time.len(), found: samples.len() });
        }
        let grid = samples[0].grid();
        for s in &samples[1..] {
            if !grid.same(s.grid()) {
                return Err(Error::GridMismatch);
            }
        }
        Ok(TimeSeries { time, samples })
    }

    pub fn from_fn(time: TimeGrid, mut f: impl FnMut(f64) -> F) -> Result<Self> {
        let samples = time.times().map(&mut f).collect();
        Self::new(time, samples)
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.time
    }

    pub fn grid(&self) -> &Grid {
        self.samples[0].grid()
    }

    pub fn samples(&self) -> &[F] {
        &self.samples
    }

    pub fn sample(&self, m: usize) -> Result<&F> {
        self.samples.get(m).ok_or(Error::OffGrid { index: m, samples: self.samples.len() })
    }

    pub fn into_samples(self) -> Vec<F> {
        self.samples
    }

    pub fn check_compatible<G: Field>(&self, other: &TimeSeries<G>) -> Result<()> {
        if self.time != other.time {
            return Err(Error::TimeGridMismatch);
        }
        if !self.grid().same(other.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Sample-wise linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| {
                let mut z = x.zeros_like();
                z.axpy(a, x);
                z.axpy(b, y);
                z
            })
            .collect();
        Ok(TimeSeries { time: self.time, samples })
    }
}

fn frequency_magnitudes(grid: &Grid) -> Vec<f64> {
    (0..grid.len()).map(|i| sqrt(grid.norm_sq(i))).collect()
}

/// `V(t)(f, g)` and its time derivative for one spectral component.
pub fn free_wave_spectrum(f: &Spectrum, g: &Spectrum, t: f64) -> (Spectrum, Spectrum) {
    let grid = f.grid().clone();
    let mut u = Spectrum::zeros(&grid);
    let mut ut = Spectrum::zeros(&grid);
    let (fc, gc) = (f.coeffs(), g.coeffs());
    for (idx, (uo, vo)) in u.coeffs_mut().iter_mut().zip(ut.coeffs_mut()).enumerate() {
        let w = sqrt(grid.norm_sq(idx));
        if w == 0.0 {
            *uo = fc[idx];
            *vo = ZERO;
            continue;
        }
        let (c, s) = (cos(w * t), sin(w * t));
        *uo = fc[idx] * c + gc[idx] * (s / w);
        *vo = gc[idx] * c - fc[idx] * (w * s);
    }
    (u, ut)
}

fn check_pair<F: Field>(f: &F, g: &F) -> Result<(Vec<Spectrum>, Vec<Spectrum>)> {
    if !f.grid().same(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let gs = g.spectra();
    for s in &gs {
        s.require_mean_free()?;
    }
    Ok((f.spectra(), gs))
}

/// `cos(t|∇|) f + sin(t|∇|)|∇|⁻¹ g`, exact per mode. The mean of `f` is
/// carried along unchanged; `g` must be mean-free.
pub fn free_wave<F: Field>(f: &F, g: &F, t: f64) -> Result<F> {
    let (fs, gs) = check_pair(f, g)?;
    let out: Vec<Spectrum> = fs.iter().zip(&gs).map(|(a, b)| free_wave_spectrum(a, b, t).0).collect();
    F::from_spectra(f.grid(), &out)
}

/// Exact time derivative `-|∇| sin(t|∇|) f + cos(t|∇|) g` of [`free_wave`].
pub fn free_wave_velocity<F: Field>(f: &F, g: &F, t: f64) -> Result<F> {
    let (fs, gs) = check_pair(f, g)?;
    let out: Vec<Spectrum> = fs.iter().zip(&gs).map(|(a, b)| free_wave_spectrum(a, b, t).1).collect();
    F::from_spectra(f.grid(), &out)
}

fn trapezoid_weight(q: usize, m: usize) -> f64 {
    if q == 0 || q == m {
        0.5
    } else {
        1.0
    }
}

/// `□⁻¹F(t_m) = ∫₀^{t_m} sin((t_m - s)|∇|)|∇|⁻¹ F(s) ds` by the composite
/// trapezoidal rule over the samples `0..=m`. The zero mode uses the kernel
/// `t_m - s`.
pub fn duhamel<F: Field>(forcing: &TimeSeries<F>, m: usize) -> Result<F> {
    duhamel_direct(forcing, m, false)
}

/// Time derivative of [`duhamel`], with the differentiated kernel
/// `cos((t_m - s)|∇|)` under the same quadrature.
pub fn duhamel_velocity<F: Field>(forcing: &TimeSeries<F>, m: usize) -> Result<F> {
    duhamel_direct(forcing, m, true)
}

fn duhamel_direct<F: Field>(forcing: &TimeSeries<F>, m: usize, velocity: bool) -> Result<F> {
    let time = forcing.time_grid();
    if m >= time.len() {
        return Err(Error::OffGrid { index: m, samples: time.len() });
    }
    let grid = forcing.grid().clone();
    let omega = frequency_magnitudes(&grid);
    let count = F::component_count(grid.dim());
    let mut acc: Vec<Spectrum> = (0..count).map(|_| Spectrum::zeros(&grid)).collect();
    if m > 0 {
        let t = time.time(m);
        for q in 0..=m {
            let w = trapezoid_weight(q, m) * time.dt();
            let lag = t - time.time(q);
            for (a, f) in acc.iter_mut().zip(forcing.samples()[q].spectra()) {
                for ((c, fc), &om) in a.coeffs_mut().iter_mut().zip(f.coeffs()).zip(&omega) {
                    let k = match (velocity, om == 0.0) {
                        (false, true) => lag,
                        (false, false) => sin(om * lag) / om,
                        (true, true) => 1.0,
                        (true, false) => cos(om * lag),
                    };
                    *c += fc * (w * k);
                }
            }
        }
    }
    F::from_spectra(&grid, &acc)
}

/// Running trapezoidal Duhamel integral over a stream of forcing spectra,
/// `O(1)` work per mode and sample.
///
/// With `A^± = Σ_q w_q e^{∓iω s_q} F̂_q` the value at `t` is
/// `(e^{iωt}A⁺ - e^{-iωt}A⁻)/(2iω)` and the derivative
/// `(e^{iωt}A⁺ + e^{-iωt}A⁻)/2`.
#[derive(Clone, Debug)]
pub struct DuhamelStream {
    time: TimeGrid,
    omega: Vec<f64>,
    plus: Vec<Vec<Complex64>>,
    minus: Vec<Vec<Complex64>>,
    mass: Vec<Complex64>,
    moment: Vec<Complex64>,
    next: usize,
}

impl DuhamelStream {
    pub fn new(grid: &Grid, time: TimeGrid, components: usize) -> Self {
        let len = grid.len();
        DuhamelStream {
            time,
            omega: frequency_magnitudes(grid),
            plus: vec![vec![ZERO; len]; components],
            minus: vec![vec![ZERO; len]; components],
            mass: vec![ZERO; components],
            moment: vec![ZERO; components],
            next: 0,
        }
    }

    /// Index of the sample the next call to [`push`](Self::push) consumes.
    pub fn position(&self) -> usize {
        self.next
    }

    /// Consumes `F(t_m)` for the next sample `m` and returns the Duhamel value
    /// and its time derivative at `t_m`.
    pub fn push(&mut self, forcing: &[Spectrum]) -> (Vec<Spectrum>, Vec<Spectrum>) {
        assert_eq!(forcing.len(), self.plus.len(), "component count");
        let m = self.next;
        assert!(m < self.time.len(), "stream exhausted");
        self.next += 1;
        let grid = forcing[0].grid().clone();
        let t = self.time.time(m);
        let dt = self.time.dt();
        let phase: Vec<Complex64> = self.omega.iter().map(|&w| cis(w * t)).collect();

        let mut values = Vec::with_capacity(forcing.len());
        let mut rates = Vec::with_capacity(forcing.len());
        for (c, f) in forcing.iter().enumerate() {
            let fc = f.coeffs();
            let mut val = Spectrum::zeros(&grid);
            let mut rate = Spectrum::zeros(&grid);
            // the newest sample enters with half weight now, full weight later
            let half = if m == 0 { 0.0 } else { 0.5 * dt };
            let full = if m == 0 { 0.5 * dt } else { dt };
            if m > 0 {
                let (vo, ro) = (val.coeffs_mut(), rate.coeffs_mut());
                for idx in 0..fc.len() {
                    let w = self.omega[idx];
                    if w == 0.0 {
                        let mass = self.mass[c] + fc[idx] * half;
                        let moment = self.moment[c] + fc[idx] * (half * t);
                        vo[idx] = mass * t - moment;
                        ro[idx] = mass;
                        continue;
                    }
                    let e = phase[idx];
                    let ap = self.plus[c][idx] + fc[idx] * e.conj() * half;
                    let am = self.minus[c][idx] + fc[idx] * e * half;
                    let fwd = e * ap;
                    let back = e.conj() * am;
                    let d = fwd - back;
                    // (fwd - back) / (2iω)
                    vo[idx] = Complex64::new(d.im, -d.re) * (0.5 / w);
                    ro[idx] = (fwd + back) * 0.5;
                }
            }
            for idx in 0..fc.len() {
                if self.omega[idx] == 0.0 {
                    self.mass[c] += fc[idx] * full;
                    self.moment[c] += fc[idx] * (full * t);
                } else {
                    let e = phase[idx];
                    self.plus[c][idx] += fc[idx] * e.conj() * full;
                    self.minus[c][idx] += fc[idx] * e * full;
                }
            }
            values.push(val);
            rates.push(rate);
        }
        (values, rates)
    }
}

/// All Duhamel values and derivatives along the time grid of `forcing`.
pub fn duhamel_series<F: Field>(forcing: &TimeSeries<F>) -> Result<(TimeSeries<F>, TimeSeries<F>)> {
    let grid = forcing.grid().clone();
    let time = forcing.time_grid();
    let mut stream = DuhamelStream::new(&grid, time, F::component_count(grid.dim()));
    let mut values = Vec::with_capacity(time.len());
    let mut rates = Vec::with_capacity(time.len());
    for f in forcing.samples() {
        let (v, r) = stream.push(&f.spectra());
        values.push(F::from_spectra(&grid, &v)?);
        rates.push(F::from_spectra(&grid, &r)?);
    }
    Ok((TimeSeries::new(time, values)?, TimeSeries::new(time, rates)?))
}

/// `∂_t² u - Δu` at an interior sample by the centered second difference.
pub fn box_fd<F: Field>(u: &TimeSeries<F>, m: usize) -> Result<F> {
    let time = u.time_grid();
    if m == 0 || m >= time.steps() {
        return Err(Error::OffGrid { index: m, samples: time.len() });
    }
    let s = u.samples();
    let inv = 1.0 / (time.dt() * time.dt());
    let mut out = s[m + 1].zeros_like();
    out.axpy(inv, &s[m + 1]);
    out.axpy(-2.0 * inv, &s[m]);
    out.axpy(inv, &s[m - 1]);
    let lap: Vec<Spectrum> = s[m].spectra().iter().map(|c| c.laplacian()).collect();
    out.axpy(-1.0, &F::from_spectra(u.grid(), &lap)?);
    Ok(out)
}

/// Second and first time derivatives at sample `m` of a uniformly sampled
/// sequence: centered in the interior, one-sided second order at the ends.
pub(crate) fn time_derivatives<T>(samples: &[T], m: usize, dt: f64, mut comb: impl FnMut(&[(usize, f64)]) -> T) -> (T, T)
where
    T: Sized,
{
    let last = samples.len() - 1;
    let (i2, i1) = (1.0 / (dt * dt), 1.0 / (2.0 * dt));
    if m == 0 {
        (
            comb(&[(0, 2.0 * i2), (1, -5.0 * i2), (2, 4.0 * i2), (3, -i2)]),
            comb(&[(0, -3.0 * i1), (1, 4.0 * i1), (2, -i1)]),
        )
    } else if m == last {
        (
            comb(&[(last, 2.0 * i2), (last - 1, -5.0 * i2), (last - 2, 4.0 * i2), (last - 3, -i2)]),
            comb(&[(last, 3.0 * i1), (last - 1, -4.0 * i1), (last - 2, i1)]),
        )
    } else {
        (
            comb(&[(m - 1, i2), (m, -2.0 * i2), (m + 1, i2)]),
            comb(&[(m - 1, -i1), (m + 1, i1)]),
        )
    }
}
