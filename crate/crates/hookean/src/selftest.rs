//! Small-grid invariant suites run by `hookean selftest`.

use hookean_core::diagnostics::{det_residual, two_variation, SampledPath};
use hookean_core::hookean::{compatibility_residuals, determinant, make_shear_data, principal_minor_sum_matrix, InitialData};
use hookean_core::rng::{random_field, seeded, symmetric};
use hookean_core::solver::{cross_validate, picard_solve, SolverConfig};
use hookean_core::spectral::{dyadic_project, gradient, leray_project, riesz};
use hookean_core::wave::{duhamel, free_wave, TimeGrid, TimeSeries};
use hookean_core::{Field, Grid, ScalarField, VectorField};

use crate::snapshot::Snapshot;

type Check = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn core(e: hookean_core::Error) -> String {
    e.to_string()
}

fn grids() -> Vec<Grid> {
    [(2, 16), (2, 32), (3, 16)].iter().map(|&(n, p)| Grid::new(n, p).expect("valid grid")).collect()
}

fn random_vector(grid: &Grid, seed: u64) -> VectorField {
    let mut r = seeded(seed);
    VectorField::new((0..grid.dim()).map(|_| random_field(grid, &mut r)).collect()).expect("dim components")
}

fn spectral_calculus() -> Check {
    for grid in grids() {
        for seed in 0..5 {
            let v = random_vector(&grid, seed);
            let scale = v.max_abs();
            let p = leray_project(&v).map_err(core)?;
            let pp = leray_project(&p).map_err(core)?;
            ensure(pp.difference(&p).max_abs() <= 1e-12 * scale, || "Leray projection is not idempotent".into())?;
            let u = v.component(0);
            let pg = leray_project(&gradient(u)).map_err(core)?;
            ensure(pg.max_abs() <= 1e-12 * gradient(u).max_abs(), || "Leray projection of a gradient".into())?;
            let mut sum = ScalarField::zeros(&grid);
            for i in 0..grid.dim() {
                sum.axpy(1.0, &riesz(&riesz(u, i).map_err(core)?, i).map_err(core)?);
            }
            sum.axpy(1.0, u);
            ensure(sum.max_abs() <= 1e-12 * u.max_abs(), || "sum of R_i R_i is not -1".into())?;
            let mut parts = u.scaled(-1.0);
            for j in 0..grid.band_count() {
                parts.axpy(1.0, &dyadic_project(u, j));
            }
            ensure(parts.max_abs() <= 1e-12 * u.max_abs(), || "dyadic shells do not sum to the field".into())?;
        }
    }
    Ok(())
}

fn minor_algebra() -> Check {
    let mut r = seeded(7);
    for n in [2, 3] {
        for _ in 0..50 {
            let a: Vec<f64> = (0..n * n).map(|_| symmetric(&mut r)).collect();
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[i * n + i] += 1.0;
            }
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            let minors: f64 = (2..=n).map(|k| principal_minor_sum_matrix(&a, n, k)).sum();
            let det = determinant(&shifted, n);
            ensure((det - 1.0 - trace - minors).abs() <= 1e-12 * det.abs().max(1.0), || {
                format!("det(I + A) = {det} against expansion {}", 1.0 + trace + minors)
            })?;
        }
    }
    Ok(())
}

fn propagators() -> Check {
    let grid = Grid::new(2, 16).map_err(core)?;
    let f = ScalarField::from_fn(&grid, |x| (x[0] + 2.0 * x[1]).sin());
    let t = 0.7;
    let u = free_wave(&f, &ScalarField::zeros(&grid), t).map_err(core)?;
    let exact = f.scaled((5f64.sqrt() * t).cos());
    ensure(u.difference(&exact).max_abs() <= 1e-10, || "free wave differs from its closed form".into())?;
    // constant forcing sin x: u(t) = (1 - cos t) sin x
    let forcing = ScalarField::from_fn(&grid, |x| x[0].sin());
    let mut errors = Vec::new();
    for steps in [10, 20] {
        let time = TimeGrid::new(1.0 / steps as f64, steps).map_err(core)?;
        let series = TimeSeries::from_fn(time, |_| forcing.clone()).map_err(core)?;
        let d = duhamel(&series, steps).map_err(core)?;
        errors.push(d.difference(&forcing.scaled(1.0 - 1f64.cos())).max_abs());
    }
    let order = (errors[0] / errors[1]).log2();
    ensure((order - 2.0).abs() <= 0.1, || format!("Duhamel convergence order {order}"))
}

fn compatibility() -> Check {
    for grid in [Grid::new(2, 32), Grid::new(3, 16)] {
        let grid = grid.map_err(core)?;
        for seed in 0..5 {
            let r = compatibility_residuals(&make_shear_data(&grid, 0.05, seed)).map_err(core)?;
            ensure(r.det <= 1e-9 && r.velocity <= 1e-9, || format!("seed {seed}: residuals {r:?}"))?;
        }
    }
    Ok(())
}

fn small_config() -> SolverConfig {
    SolverConfig::new(2, 16, 0.01, 0.5, 0.05)
}

fn picard() -> Check {
    let cfg = small_config();
    let grid = cfg.grid().map_err(core)?;
    let out = picard_solve(&make_shear_data(&grid, cfg.epsilon, 1), &cfg).map_err(core)?;
    ensure(out.converged, || "did not converge".into())?;
    ensure(out.ratios.iter().all(|r| *r < 0.5), || format!("ratios {:?}", out.ratios))?;
    let worst = out.state.g.samples().iter().map(det_residual).fold(0.0, f64::max);
    ensure(worst <= 1e-9, || format!("det residual {worst}"))?;
    let zero = picard_solve(&InitialData::zeros(&grid), &cfg).map_err(core)?;
    ensure(zero.converged && zero.state.g.samples().iter().all(|g| g.max_abs() == 0.0), || "zero data".into())
}

fn direct() -> Check {
    let cfg = SolverConfig::new(2, 16, 1e-3, 0.5, 0.0125);
    let grid = cfg.grid().map_err(core)?;
    let cv = cross_validate(&make_shear_data(&grid, cfg.epsilon, 1), &cfg).map_err(core)?;
    ensure(cv.relative_difference <= 1e-3, || format!("relative difference {}", cv.relative_difference))
}

fn variation() -> Check {
    let mut r = seeded(11);
    for _ in 0..20 {
        let len = 2 + (symmetric(&mut r).abs() * 8.0) as usize;
        let values: Vec<f64> = (0..len).map(|_| symmetric(&mut r)).collect();
        let path = SampledPath::scalar(&values).map_err(core)?;
        let mut best = 0.0f64;
        for mask in 0u32..1 << (len - 2) {
            let (mut prev, mut acc) = (0, 0.0);
            for i in 1..len {
                if i == len - 1 || mask & (1 << (i - 1)) != 0 {
                    acc += path.increment_sq(i, prev);
                    prev = i;
                }
            }
            best = best.max(acc);
        }
        ensure(two_variation(&path) == best.sqrt(), || format!("path {values:?}"))?;
    }
    Ok(())
}

fn snapshots() -> Check {
    for grid in grids() {
        let v = random_vector(&grid, 3);
        let snap = Snapshot::from_fields(0.25, v.components());
        let back = Snapshot::decode(&snap.encode())?;
        ensure(back == snap, || "snapshot round trip".into())?;
    }
    Ok(())
}

pub const SUITES: [(&str, fn() -> Check); 8] = [
    ("spectral-calculus", spectral_calculus),
    ("minor-algebra", minor_algebra),
    ("propagators", propagators),
    ("compatibility", compatibility),
    ("picard", picard),
    ("direct", direct),
    ("variation", variation),
    ("snapshots", snapshots),
];

/// Runs every suite, returning `(name, result)` in a fixed order.
pub fn run_suites() -> Vec<(&'static str, Check)> {
    SUITES.iter().map(|(name, f)| (*name, f())).collect()
}
