//! `simulate`, `sweep` and `check-data`.

use std::path::{Path, PathBuf};

use hookean_core::diagnostics::{direct_row, picard_report, sweep_report, SweepRun};
use hookean_core::hookean::{compatibility_residuals, make_shear_data, InitialData};
use hookean_core::solver::{direct_run, picard_solve, PicardOutcome};
use hookean_core::{Field, VectorField};

use crate::config::{InitKind, RunConfig, SolverKind};
use crate::error::{CliError, CliResult};
use crate::report::{diagnostics_csv, sci, sweep_csv, write_text, RunLog, Summary};
use crate::snapshot::{read_snapshot, write_snapshot, Snapshot};

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    /// Ran correctly but left the contraction regime.
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::NotConverged => 2,
        }
    }
}

/// Initial data as configured; snapshot files hold `f` then `g`.
pub fn load_data(cfg: &RunConfig) -> CliResult<InitialData> {
    let sc = &cfg.solver_config;
    let grid = cfg.solver_config.grid().map_err(config_error)?;
    match &cfg.init {
        InitKind::ShearComposition => Ok(make_shear_data(&grid, sc.epsilon, sc.seed)),
        InitKind::File(path) => {
            let snap = read_snapshot(path)?;
            let bad = |reason: String| CliError::Snapshot { path: path.clone(), reason };
            if !snap.grid()?.same(&grid) {
                return Err(bad(format!("grid n = {}, N = {} does not match the config", snap.dim, snap.points)));
            }
            let n = grid.dim();
            if snap.components.len() != 2 * n {
                return Err(bad(format!("expected {} components (f then g), found {}", 2 * n, snap.components.len())));
            }
            let mut fields = snap.to_fields()?;
            let g = VectorField::new(fields.split_off(n))?;
            Ok(InitialData::new(VectorField::new(fields)?, g)?)
        }
    }
}

fn config_error(e: hookean_core::Error) -> CliError {
    match e {
        hookean_core::Error::InvalidConfig { key, reason } => CliError::config(key, reason),
        other => CliError::Core(other),
    }
}

fn prepare(dir: &Path, cfg: &RunConfig) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    write_text(&dir.join("config.toml"), &cfg.to_toml())
}

fn snapshot_dir(dir: &Path) -> CliResult<PathBuf> {
    let path = dir.join("snapshots");
    std::fs::create_dir_all(&path).map_err(CliError::io(&path))?;
    Ok(path)
}

fn snapshot_due(cfg: &RunConfig, m: usize, last: usize) -> bool {
    cfg.snapshot_every > 0 && (m % cfg.snapshot_every == 0 || m == last)
}

fn write_state(dir: &Path, m: usize, t: f64, y: &VectorField, v: &VectorField) -> CliResult<()> {
    let snap = Snapshot::from_fields(t, y.components().iter().chain(v.components()));
    write_snapshot(&dir.join(format!("state_{m:06}.hkel")), &snap)
}

fn log_compatibility(log: &mut RunLog, data: &InitialData) -> CliResult<()> {
    let r = compatibility_residuals(data)?;
    log.line(&format!(
        "compatibility: det {} velocity {} velocity_transposed {}",
        sci(r.det),
        sci(r.velocity),
        sci(r.velocity_transposed)
    ))
}

/// Picard run writing into `dir`; the outcome is returned for sweeps.
fn run_picard(cfg: &RunConfig, data: &InitialData, dir: &Path, log: &mut RunLog) -> CliResult<(Status, PicardOutcome)> {
    let out = picard_solve(data, &cfg.solver_config)?;
    for (k, r) in out.ratios.iter().enumerate() {
        log.line(&format!("picard iteration {}: difference {} ratio {}", k + 1, sci(out.differences[k + 1]), sci(*r)))?;
    }
    let report = picard_report(&out, cfg.diagnostics_every, true)?;
    write_text(&dir.join("diagnostics.csv"), &diagnostics_csv(&report.rows))?;
    let mut summary = Summary::default();
    summary.text("solver", "picard");
    summary.num("epsilon", cfg.solver_config.epsilon);
    summary.text("iterations", out.iterations);
    summary.text("converged", out.converged);
    summary.num("sup_besov_G", report.sup_besov_g());
    summary.num("max_det_residual", report.max_det_residual());
    if let Some(s) = report.s_surrogate {
        summary.num("s_surrogate", s.value());
        summary.num("s_surrogate_variation", s.variation);
        summary.num("s_surrogate_besov", s.besov);
        summary.text("s_surrogate_stride", s.stride);
    }
    for (k, r) in out.ratios.iter().enumerate() {
        summary.num(&format!("ratio_{}", k + 1), *r);
    }
    write_text(&dir.join("summary.csv"), &summary.to_csv())?;
    if cfg.snapshot_every > 0 {
        let snaps = snapshot_dir(dir)?;
        let time = out.state.time_grid();
        for m in (0..time.len()).filter(|&m| snapshot_due(cfg, m, time.steps())) {
            write_state(&snaps, m, time.time(m), &out.state.displacement(m)?, &out.state.velocity(m)?)?;
        }
    }
    let status = if out.converged { Status::Converged } else { Status::NotConverged };
    log.line(&format!("picard: {} after {} iterations", if out.converged { "converged" } else { "not converged" }, out.iterations))?;
    Ok((status, out))
}

fn run_direct(cfg: &RunConfig, data: &InitialData, dir: &Path, log: &mut RunLog) -> CliResult<Status> {
    let time = cfg.solver_config.time_grid().map_err(config_error)?;
    let snaps = if cfg.snapshot_every > 0 { Some(snapshot_dir(dir)?) } else { None };
    let mut rows = Vec::new();
    let mut pressure_iterations = 0;
    let mut io_error = None;
    direct_run(data, &cfg.solver_config, |s| {
        let m = s.step();
        pressure_iterations = pressure_iterations.max(s.pressure_iterations);
        if m % cfg.diagnostics_every == 0 || m == time.steps() {
            rows.push(direct_row(s));
        }
        if let (Some(d), true) = (&snaps, snapshot_due(cfg, m, time.steps())) {
            if let Err(e) = write_state(d, m, s.time(), &s.y, &s.velocity) {
                io_error.get_or_insert(e);
            }
        }
        Ok(())
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    write_text(&dir.join("diagnostics.csv"), &diagnostics_csv(&rows))?;
    let mut summary = Summary::default();
    summary.text("solver", "direct");
    summary.num("epsilon", cfg.solver_config.epsilon);
    summary.text("max_pressure_iterations", pressure_iterations);
    summary.num("max_det_residual", rows.iter().fold(0.0, |m, r| r.det_residual.max(m)));
    write_text(&dir.join("summary.csv"), &summary.to_csv())?;
    log.line(&format!("direct: {} steps, at most {pressure_iterations} pressure iterations", time.steps()))?;
    Ok(Status::Converged)
}

pub fn simulate(cfg: &RunConfig, quiet: bool) -> CliResult<Status> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    prepare(dir, cfg)?;
    let mut log = RunLog::create(dir, quiet)?;
    log.line(&format!("simulate: solver {} seed {}", cfg.solver.name(), cfg.solver_config.seed))?;
    let data = load_data(cfg)?;
    log_compatibility(&mut log, &data)?;
    match cfg.solver {
        SolverKind::Picard => Ok(run_picard(cfg, &data, dir, &mut log)?.0),
        SolverKind::Direct => run_direct(cfg, &data, dir, &mut log),
    }
}

/// One Picard run per amplitude, shared seed, into `eps_<k>` subdirectories.
pub fn sweep(cfg: &RunConfig, epsilons: &[f64], quiet: bool) -> CliResult<Status> {
    if epsilons.len() < 3 {
        return Err(CliError::Usage(format!("sweep needs at least 3 epsilon values, got {}", epsilons.len())));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(CliError::Usage(format!("invalid epsilon {e}")));
    }
    if cfg.solver != SolverKind::Picard {
        return Err(CliError::config("solver", "sweep runs the picard solver"));
    }
    if cfg.init != InitKind::ShearComposition {
        return Err(CliError::config("init", "sweep generates its own data"));
    }
    cfg.validate()?;
    let dir = &cfg.output_dir;
    prepare(dir, cfg)?;
    let mut log = RunLog::create(dir, quiet)?;
    let mut runs = Vec::new();
    for (k, &eps) in epsilons.iter().enumerate() {
        let mut run_cfg = cfg.clone();
        run_cfg.solver_config.epsilon = eps;
        run_cfg.output_dir = dir.join(format!("eps_{k}"));
        prepare(&run_cfg.output_dir, &run_cfg)?;
        let mut run_log = RunLog::create(&run_cfg.output_dir, true)?;
        log.line(&format!("sweep: epsilon {}", sci(eps)))?;
        let data = load_data(&run_cfg)?;
        log_compatibility(&mut run_log, &data)?;
        let (_, out) = run_picard(&run_cfg, &data, &run_cfg.output_dir, &mut run_log)?;
        runs.push(SweepRun::from_outcome(eps, &data, &out)?);
    }
    let table = sweep_report(&runs);
    write_text(&dir.join("sweep.csv"), &sweep_csv(&table))?;
    log.line(&format!("ratio spread {}", sci(table.ratio_spread)))?;
    if let Some(s) = table.first_ratio_slope {
        log.line(&format!("first ratio slope {}", sci(s)))?;
    }
    if let Some(s) = table.deviation_slope {
        log.line(&format!("free deviation slope {}", sci(s)))?;
    }
    if table.non_monotone {
        log.line("warning: solution norm is not monotone in epsilon")?;
    }
    if table.breakdown.is_empty() {
        Ok(Status::Converged)
    } else {
        log.line(&format!("breakdown at epsilon {:?}", table.breakdown))?;
        Ok(Status::NotConverged)
    }
}

/// Residuals of the configured data; exit 2 when above the solver tolerance.
pub fn check_data(cfg: &RunConfig) -> CliResult<(Status, hookean_core::hookean::CompatibilityResiduals)> {
    let data = load_data(cfg)?;
    let r = compatibility_residuals(&data)?;
    println!("det_residual,{}", sci(r.det));
    println!("velocity_residual,{}", sci(r.velocity));
    println!("velocity_transposed_residual,{}", sci(r.velocity_transposed));
    let ok = r.det <= 1e-8 && r.velocity <= 1e-8;
    Ok((if ok { Status::Converged } else { Status::NotConverged }, r))
}
