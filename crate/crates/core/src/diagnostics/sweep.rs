//! Amplitude-sweep analytics.

use alloc::vec::Vec;

use super::{besov_norm, BesovSpec};
use crate::hookean::InitialData;
use crate::math::ln;
use crate::solver::{free_wave_jacobian, PicardOutcome};
use crate::spectral::Field;
use crate::Result;

/// Summary of one run of an amplitude sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRun {
    pub epsilon: f64,
    /// `‖f‖_{Ḃ^{n/2+1}} + ‖g‖_{Ḃ^{n/2}}`
    pub data_norm: f64,
    /// `sup_t ‖G‖_{Ḃ^{n/2}} + ‖dG‖_{Ḃ^{n/2-1}}`
    pub solution_norm: f64,
    /// `sup_t ‖G - G_free‖_{Ḃ^{n/2}}`
    pub free_deviation: f64,
    pub ratios: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub data_norm: f64,
    pub solution_norm: f64,
    /// `solution_norm / data_norm`, 0 for zero data.
    pub ratio: f64,
    pub first_ratio: f64,
    pub max_ratio: f64,
    pub free_deviation: f64,
    /// `free_deviation / ε²`
    pub linearization: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `max ratio / min ratio` over converged runs with nonzero data.
    pub ratio_spread: f64,
    /// Log-log slope of the first Picard ratio against `ε`.
    pub first_ratio_slope: Option<f64>,
    /// Log-log slope of `‖G - G_free‖` against `ε`.
    pub deviation_slope: Option<f64>,
    /// Solution norm fails to be nondecreasing in `ε`.
    pub non_monotone: bool,
    /// Runs that did not converge.
    pub breakdown: Vec<f64>,
}

impl SweepRun {
    /// Norms of a Picard run with data `data` at amplitude `epsilon`.
    pub fn from_outcome(epsilon: f64, data: &InitialData, outcome: &PicardOutcome) -> Result<Self> {
        let dim = data.grid().dim();
        let s = dim as f64 / 2.0;
        let data_norm = besov_norm(&data.f, BesovSpec::new(s + 1.0)) + besov_norm(&data.g, BesovSpec::new(s));
        let time = outcome.state.time_grid();
        let mut solution_norm = 0.0f64;
        let mut free_deviation = 0.0f64;
        for m in 0..time.len() {
            let g = &outcome.state.g.samples()[m];
            let dg = &outcome.state.dg.samples()[m];
            solution_norm =
                solution_norm.max(besov_norm(g, BesovSpec::new(s)) + besov_norm(dg, BesovSpec::new(s - 1.0)));
            let (free, _) = free_wave_jacobian(data, time.time(m))?;
            free_deviation = free_deviation.max(besov_norm(&g.difference(&free), BesovSpec::new(s)));
        }
        Ok(SweepRun {
            epsilon,
            data_norm,
            solution_norm,
            free_deviation,
            ratios: outcome.ratios.clone(),
            converged: outcome.converged,
        })
    }
}

/// Least-squares slope of `ln y` against `ln x` over pairs with both
/// positive; `None` with fewer than two such pairs.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (ln(*x), ln(*y))).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

pub fn sweep_report(runs: &[SweepRun]) -> SweepTable {
    let mut sorted: Vec<&SweepRun> = runs.iter().collect();
    sorted.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let rows: Vec<SweepRow> = sorted
        .iter()
        .map(|r| SweepRow {
            epsilon: r.epsilon,
            data_norm: r.data_norm,
            solution_norm: r.solution_norm,
            ratio: if r.data_norm > 0.0 { r.solution_norm / r.data_norm } else { 0.0 },
            first_ratio: r.ratios.first().copied().unwrap_or(0.0),
            max_ratio: r.ratios.iter().copied().fold(0.0, f64::max),
            free_deviation: r.free_deviation,
            linearization: if r.epsilon > 0.0 { r.free_deviation / (r.epsilon * r.epsilon) } else { 0.0 },
            converged: r.converged,
        })
        .collect();
    let good: Vec<f64> = rows.iter().filter(|r| r.converged && r.ratio > 0.0).map(|r| r.ratio).collect();
    let ratio_spread = if good.is_empty() {
        0.0
    } else {
        good.iter().copied().fold(0.0, f64::max) / good.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let first: Vec<f64> = rows.iter().map(|r| r.first_ratio).collect();
    let dev: Vec<f64> = rows.iter().map(|r| r.free_deviation).collect();
    let non_monotone = rows.windows(2).any(|w| w[1].solution_norm < w[0].solution_norm);
    let breakdown = rows.iter().filter(|r| !r.converged).map(|r| r.epsilon).collect();
    SweepTable {
        first_ratio_slope: loglog_slope(&eps, &first),
        deviation_slope: loglog_slope(&eps, &dev),
        rows,
        ratio_spread,
        non_monotone,
        breakdown,
    }
}
