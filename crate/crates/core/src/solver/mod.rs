//! The Picard iteration on `G = ∇Y` and a leapfrog pressure-projection
//! stepper used to cross-check it.

mod direct;
mod picard;

pub use direct::{cross_validate, direct_run, direct_step, CrossValidation, DirectState, PressureSettings};
pub use picard::{free_wave_jacobian, picard_map, picard_solve, PicardIteration, PicardOutcome, PicardState};

use crate::wave::TimeGrid;
use crate::{Error, Grid, Result};

/// Numerical parameters shared by both solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub dimension: usize,
    pub grid_n: usize,
    /// Data amplitude.
    pub epsilon: f64,
    pub t_end: f64,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub pressure_tol: f64,
    pub pressure_max_iter: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(dimension: usize, grid_n: usize, epsilon: f64, t_end: f64, dt: f64) -> Self {
        SolverConfig {
            dimension,
            grid_n,
            epsilon,
            t_end,
            dt,
            picard_tol: 1e-10,
            picard_max_iter: 20,
            pressure_tol: 1e-12,
            pressure_max_iter: 200,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key, reason| Err(Error::InvalidConfig { key, reason });
        if !(2..=3).contains(&self.dimension) {
            return bad("dimension", "dimension must be 2 or 3");
        }
        if self.grid_n < 8 || !self.grid_n.is_power_of_two() {
            return bad("grid_n", "must be a power of two >= 8");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon", "must be finite and >= 0");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be finite and > 0");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end", "must be finite and > 0");
        }
        if TimeGrid::from_horizon(self.t_end, self.dt).is_err() {
            return bad("t_end", "must be an integer multiple of dt with at least 4 steps");
        }
        if !(self.picard_tol > 0.0 && self.picard_tol.is_finite()) {
            return bad("picard_tol", "must be finite and > 0");
        }
        if self.picard_max_iter == 0 {
            return bad("picard_max_iter", "must be >= 1");
        }
        if !(self.pressure_tol > 0.0 && self.pressure_tol.is_finite()) {
            return bad("pressure_tol", "must be finite and > 0");
        }
        if self.pressure_max_iter == 0 {
            return bad("pressure_max_iter", "must be >= 1");
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        self.validate()?;
        Grid::new(self.dimension, self.grid_n)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        self.validate()?;
        TimeGrid::from_horizon(self.t_end, self.dt)
    }

    pub fn pressure(&self) -> PressureSettings {
        PressureSettings { tol: self.pressure_tol, max_iter: self.pressure_max_iter }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_keys() {
        let ok = SolverConfig::new(2, 64, 0.01, 5.0, 0.01);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.time_grid().unwrap().steps(), 500);
        let key = |c: SolverConfig| match c.validate() {
            Err(Error::InvalidConfig { key, .. }) => key,
            other => panic!("{other:?}"),
        };
        assert_eq!(key(SolverConfig { dimension: 4, ..ok.clone() }), "dimension");
        assert_eq!(key(SolverConfig { dt: 0.0, ..ok.clone() }), "dt");
        assert_eq!(key(SolverConfig { grid_n: 48, ..ok.clone() }), "grid_n");
        assert_eq!(key(SolverConfig { t_end: 5.005, dt: 0.01, ..ok.clone() }), "t_end");
        assert_eq!(key(SolverConfig { picard_tol: 0.0, ..ok.clone() }), "picard_tol");
        assert_eq!(key(SolverConfig { epsilon: -1.0, ..ok }), "epsilon");
    }
}
