//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hookean_core::solver::SolverConfig;
use hookean_core::Error;
use toml::Value;

use crate::error::{CliError, CliResult};

pub const REQUIRED_KEYS: [&str; 5] = ["dimension", "grid_n", "epsilon", "t_end", "dt"];

pub const OPTIONAL_KEYS: [&str; 10] = [
    "solver",
    "picard_tol",
    "picard_max_iter",
    "pressure_tol",
    "pressure_max_iter",
    "seed",
    "init",
    "output_dir",
    "snapshot_every",
    "diagnostics_every",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Picard,
    Direct,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Picard => "picard",
            SolverKind::Direct => "direct",
        }
    }
}

/// Where the initial data come from.
#[derive(Clone, Debug, PartialEq)]
pub enum InitKind {
    ShearComposition,
    /// Snapshot holding `f` then `g` (`2n` components).
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub solver_config: SolverConfig,
    pub solver: SolverKind,
    pub init: InitKind,
    pub output_dir: PathBuf,
    /// Steps between snapshots; 0 writes none.
    pub snapshot_every: usize,
    /// Steps between diagnostics rows; the last sample is always written.
    pub diagnostics_every: usize,
}

fn flatten(table: toml::Table) -> CliResult<BTreeMap<String, Value>> {
    let mut flat = BTreeMap::new();
    let mut insert = |key: String, value: Value| {
        if matches!(value, Value::Table(_) | Value::Array(_)) {
            return Err(CliError::config(&key, "nested values are not supported"));
        }
        if flat.insert(key.clone(), value).is_some() {
            return Err(CliError::config(&key, "given more than once"));
        }
        Ok(())
    };
    for (key, value) in table {
        match value {
            Value::Table(section) => {
                for (k, v) in section {
                    insert(k, v)?;
                }
            }
            other => insert(key, other)?,
        }
    }
    Ok(flat)
}

struct Keys(BTreeMap<String, Value>);

impl Keys {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key)
    }

    fn required(&mut self, key: &str) -> CliResult<Value> {
        self.take(key).ok_or_else(|| CliError::config(key, "missing required key"))
    }

    fn uint(key: &str, v: Value) -> CliResult<usize> {
        match v {
            Value::Integer(i) if i >= 0 => Ok(i as usize),
            _ => Err(CliError::config(key, "expected a non-negative integer")),
        }
    }

    fn float(key: &str, v: Value) -> CliResult<f64> {
        match v {
            Value::Float(x) => Ok(x),
            Value::Integer(i) => Ok(i as f64),
            _ => Err(CliError::config(key, "expected a number")),
        }
    }

    fn string(key: &str, v: Value) -> CliResult<String> {
        match v {
            Value::String(s) => Ok(s),
            _ => Err(CliError::config(key, "expected a string")),
        }
    }
}

/// Parses and validates a configuration; unknown keys are rejected by name.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Syntax(e.message().to_string()))?;
    let flat = flatten(table)?;
    if let Some(key) = flat.keys().find(|k| !REQUIRED_KEYS.contains(&k.as_str()) && !OPTIONAL_KEYS.contains(&k.as_str())) {
        return Err(CliError::config(key, "unknown key"));
    }
    let mut keys = Keys(flat);
    let dimension = Keys::uint("dimension", keys.required("dimension")?)?;
    let grid_n = Keys::uint("grid_n", keys.required("grid_n")?)?;
    let epsilon = Keys::float("epsilon", keys.required("epsilon")?)?;
    let t_end = Keys::float("t_end", keys.required("t_end")?)?;
    let dt = Keys::float("dt", keys.required("dt")?)?;
    let mut sc = SolverConfig::new(dimension, grid_n, epsilon, t_end, dt);
    if let Some(v) = keys.take("picard_tol") {
        sc.picard_tol = Keys::float("picard_tol", v)?;
    }
    if let Some(v) = keys.take("picard_max_iter") {
        sc.picard_max_iter = Keys::uint("picard_max_iter", v)?;
    }
    if let Some(v) = keys.take("pressure_tol") {
        sc.pressure_tol = Keys::float("pressure_tol", v)?;
    }
    if let Some(v) = keys.take("pressure_max_iter") {
        sc.pressure_max_iter = Keys::uint("pressure_max_iter", v)?;
    }
    if let Some(v) = keys.take("seed") {
        sc.seed = Keys::uint("seed", v)? as u64;
    }
    let solver = match keys.take("solver").map(|v| Keys::string("solver", v)).transpose()?.as_deref() {
        None | Some("picard") => SolverKind::Picard,
        Some("direct") => SolverKind::Direct,
        Some(_) => return Err(CliError::config("solver", "expected \"picard\" or \"direct\"")),
    };
    let init = match keys.take("init").map(|v| Keys::string("init", v)).transpose()? {
        None => InitKind::ShearComposition,
        Some(s) if s == "shear_composition" => InitKind::ShearComposition,
        Some(s) => match s.strip_prefix("file:") {
            Some(path) if !path.is_empty() => InitKind::File(PathBuf::from(path)),
            _ => return Err(CliError::config("init", "expected \"shear_composition\" or \"file:<path>\"")),
        },
    };
    let output_dir = match keys.take("output_dir") {
        Some(v) => PathBuf::from(Keys::string("output_dir", v)?),
        None => PathBuf::from("output"),
    };
    let snapshot_every = keys.take("snapshot_every").map(|v| Keys::uint("snapshot_every", v)).transpose()?.unwrap_or(0);
    let diagnostics_every =
        keys.take("diagnostics_every").map(|v| Keys::uint("diagnostics_every", v)).transpose()?.unwrap_or(1);
    if diagnostics_every == 0 {
        return Err(CliError::config("diagnostics_every", "must be >= 1"));
    }
    let cfg = RunConfig { solver_config: sc, solver, init, output_dir, snapshot_every, diagnostics_every };
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.solver_config.validate().map_err(|e| match e {
            Error::InvalidConfig { key, reason } => CliError::config(key, reason),
            other => CliError::Core(other),
        })
    }

    /// Resolved configuration in the input syntax, all defaults spelled out.
    pub fn to_toml(&self) -> String {
        let c = &self.solver_config;
        let init = match &self.init {
            InitKind::ShearComposition => "shear_composition".to_string(),
            InitKind::File(p) => format!("file:{}", p.display()),
        };
        let mut s = String::new();
        let _ = writeln!(s, "dimension = {}", c.dimension);
        let _ = writeln!(s, "grid_n = {}", c.grid_n);
        let _ = writeln!(s, "epsilon = {:?}", c.epsilon);
        let _ = writeln!(s, "t_end = {:?}", c.t_end);
        let _ = writeln!(s, "dt = {:?}", c.dt);
        let _ = writeln!(s, "solver = {:?}", self.solver.name());
        let _ = writeln!(s, "picard_tol = {:?}", c.picard_tol);
        let _ = writeln!(s, "picard_max_iter = {}", c.picard_max_iter);
        let _ = writeln!(s, "pressure_tol = {:?}", c.pressure_tol);
        let _ = writeln!(s, "pressure_max_iter = {}", c.pressure_max_iter);
        let _ = writeln!(s, "seed = {}", c.seed);
        let _ = writeln!(s, "init = {init:?}");
        let _ = writeln!(s, "output_dir = {:?}", self.output_dir.display().to_string());
        let _ = writeln!(s, "snapshot_every = {}", self.snapshot_every);
        let _ = writeln!(s, "diagnostics_every = {}", self.diagnostics_every);
        s
    }
}
