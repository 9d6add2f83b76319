//! 2-variation of sampled paths and the propagator-twisted surrogate.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{besov_spectra, BesovSpec};
use crate::math::{band_weight, cis, sqrt};
use crate::solver::PicardState;
use crate::spectral::{Field, Spectrum};
use crate::{Error, Result};

/// Snapshots `v(t_0), v(t_1), …` of a path in a Euclidean space.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    snapshots: Vec<Vec<f64>>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, snapshots: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidPath { reason: "need at least two samples" });
        }
        if times.len() != snapshots.len() {
            return Err(Error::InvalidPath { reason: "times and snapshots differ in length" });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPath { reason: "times must be strictly increasing" });
        }
        let width = snapshots[0].len();
        if snapshots.iter().any(|s| s.len() != width) {
            return Err(Error::InvalidPath { reason: "snapshots differ in length" });
        }
        Ok(SampledPath { times, snapshots })
    }

    /// Scalar path on unit-spaced times.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        let times = (0..values.len()).map(|i| i as f64).collect();
        Self::new(times, values.iter().map(|&v| vec![v]).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Vec<f64>] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `‖v_i - v_j‖²`
    pub fn increment_sq(&self, i: usize, j: usize) -> f64 {
        self.snapshots[i].iter().zip(&self.snapshots[j]).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// `sup_τ (Σ ‖v(t_{k+1}) - v(t_k)‖²)^{1/2}` over all increasing subsequences
/// of sample indices, by dynamic programming.
pub fn two_variation(path: &SampledPath) -> f64 {
    let m = path.len();
    let mut best = vec![0.0f64; m];
    for i in 1..m {
        let mut b = 0.0f64;
        for j in 0..i {
            b = b.max(best[j] + path.increment_sq(i, j));
        }
        best[i] = b;
    }
    sqrt(best.iter().copied().fold(0.0, f64::max))
}

/// Split of the surrogate into its two parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SSurrogate {
    /// `Σ_j 2^{js} (V²(w₊) + V²(w₋))` on band `j`.
    pub variation: f64,
    /// `sup_t [‖G‖_{Ḃ^s} + ‖|∇|⁻¹ dG‖_{Ḃ^s}]`
    pub besov: f64,
    /// Stride between the samples used for the variation part.
    pub stride: usize,
}

impl SSurrogate {
    pub fn value(&self) -> f64 {
        self.variation + self.besov
    }
}

/// Largest number of snapshots entering a variation computation.
pub const MAX_PATH_SAMPLES: usize = 256;

/// Propagator-twisted variation surrogate. For each band `j` the paths
/// `w±(t) = e^{±it|∇|}(G ± i|∇|⁻¹ dG)(t)` are constant for free waves, so the
/// variation part measures the deviation from free evolution.
pub fn s_surrogate(state: &PicardState, spec: BesovSpec) -> SSurrogate {
    let time = state.g.time_grid();
    let grid = state.g.grid().clone();
    let stride = time.len().div_ceil(MAX_PATH_SAMPLES);
    let picks: Vec<usize> = (0..time.len()).step_by(stride).collect();

    let mut besov = 0.0f64;
    for m in 0..time.len() {
        let g = state.g.samples()[m].spectra();
        let dg: Vec<Spectrum> = state.dg.samples()[m].spectra().iter().map(|s| s.inverse_abs_gradient_unchecked()).collect();
        besov = besov.max(besov_spectra(&g, spec) + besov_spectra(&dg, spec));
    }

    let bands = grid.band_count();
    let scale = sqrt(grid.volume());
    // snapshots[band][sign][sample] flattened as (re, im) pairs
    let mut paths: Vec<[Vec<Vec<f64>>; 2]> = (0..bands).map(|_| [Vec::new(), Vec::new()]).collect();
    for &m in &picks {
        let t = time.time(m);
        let g = state.g.samples()[m].spectra();
        let dg = state.dg.samples()[m].spectra();
        let mut snap: Vec<[Vec<f64>; 2]> = (0..bands).map(|_| [Vec::new(), Vec::new()]).collect();
        for (gc, dc) in g.iter().zip(&dg) {
            for idx in 0..grid.len() {
                let Some(j) = grid.band(idx) else { continue };
                let w = sqrt(grid.norm_sq(idx));
                let e = cis(w * t);
                let rot = Complex64::new(0.0, 1.0 / w) * dc.coeffs()[idx];
                let plus = e * (gc.coeffs()[idx] + rot) * scale;
                let minus = e.conj() * (gc.coeffs()[idx] - rot) * scale;
                snap[j][0].extend([plus.re, plus.im]);
                snap[j][1].extend([minus.re, minus.im]);
            }
        }
        for (j, [p, q]) in snap.into_iter().enumerate() {
            paths[j][0].push(p);
            paths[j][1].push(q);
        }
    }
    let times: Vec<f64> = picks.iter().map(|&m| time.time(m)).collect();
    let mut variation = 0.0;
    if times.len() >= 2 {
        for (j, pair) in paths.into_iter().enumerate() {
            for snapshots in pair {
                let path = SampledPath::new(times.clone(), snapshots).expect("uniform samples");
                variation += band_weight(j, spec.s) * two_variation(&path);
            }
        }
    }
    SSurrogate { variation, besov, stride }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(path: &SampledPath) -> f64 {
        let m = path.len();
        let interior = m - 2;
        let mut best = 0.0f64;
        for mask in 0u32..(1 << interior) {
            let mut prev = 0;
            let mut acc = 0.0;
            for i in 1..m {
                if i == m - 1 || mask & (1 << (i - 1)) != 0 {
                    acc += path.increment_sq(i, prev);
                    prev = i;
                }
            }
            best = best.max(acc);
        }
        sqrt(best)
    }

    #[test]
    fn closed_form_paths() {
        assert_eq!(two_variation(&SampledPath::scalar(&[3.0, 3.0, 3.0]).unwrap()), 0.0);
        let a = two_variation(&SampledPath::scalar(&[0.0, 1.0, 0.0]).unwrap());
        assert_eq!(a, sqrt(2.0));
        let b = two_variation(&SampledPath::scalar(&[0.0, 1.0, 2.0]).unwrap());
        assert_eq!(b, 2.0);
        assert_eq!(brute_force(&SampledPath::scalar(&[0.0, 1.0, 2.0]).unwrap()), 2.0);
    }

    #[test]
    fn invalid_paths() {
        assert!(SampledPath::scalar(&[1.0]).is_err());
        assert!(SampledPath::new(vec![0.0, 0.0], vec![vec![1.0], vec![2.0]]).is_err());
        assert!(SampledPath::new(vec![0.0, 1.0], vec![vec![1.0], vec![2.0, 3.0]]).is_err());
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut r = crate::rng::seeded(17);
        for len in 2..=9 {
            let values: Vec<f64> = (0..len).map(|_| crate::rng::symmetric(&mut r)).collect();
            let p = SampledPath::scalar(&values).unwrap();
            assert_eq!(two_variation(&p), brute_force(&p));
        }
    }
}
