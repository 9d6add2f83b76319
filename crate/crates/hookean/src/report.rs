//! CSV writers and the run log.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use hookean_core::diagnostics::{DiagnosticsRow, SweepTable};

use crate::error::{CliError, CliResult};

pub const DIAGNOSTICS_HEADER: &str = "t,besov_G,besov_dG,energy,det_residual,pressure_curl_residual";

pub const SWEEP_HEADER: &str =
    "epsilon,data_norm,solution_norm,ratio,first_ratio,max_ratio,free_deviation,linearization,converged";

/// 17 significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in rows {
        let cols = [r.t, r.besov_g, r.besov_dg, r.energy, r.det_residual, r.pressure_curl_residual];
        s.push_str(&cols.map(sci).join(","));
        s.push('\n');
    }
    s
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in &table.rows {
        let cols = [r.epsilon, r.data_norm, r.solution_norm, r.ratio, r.first_ratio, r.max_ratio, r.free_deviation, r.linearization];
        let _ = writeln!(s, "{},{}", cols.map(sci).join(","), r.converged);
    }
    s
}

/// Two-column `key,value` file.
#[derive(Default)]
pub struct Summary(Vec<(String, String)>);

impl Summary {
    pub fn num(&mut self, key: &str, v: f64) {
        self.0.push((key.to_string(), sci(v)));
    }

    pub fn text(&mut self, key: &str, v: impl ToString) {
        self.0.push((key.to_string(), v.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,value\n");
        for (k, v) in &self.0 {
            let _ = writeln!(s, "{k},{v}");
        }
        s
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(CliError::io(path))
}

/// Appends lines to `run.log` and echoes them to stdout.
pub struct RunLog {
    path: PathBuf,
    file: File,
    quiet: bool,
}

impl RunLog {
    pub fn create(dir: &Path, quiet: bool) -> CliResult<Self> {
        let path = dir.join("run.log");
        let file = File::create(&path).map_err(CliError::io(&path))?;
        Ok(RunLog { path, file, quiet })
    }

    pub fn line(&mut self, msg: &str) -> CliResult<()> {
        if !self.quiet {
            println!("{msg}");
        }
        writeln!(self.file, "{msg}").map_err(CliError::io(&self.path))
    }
}
