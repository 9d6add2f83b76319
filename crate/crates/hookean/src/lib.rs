//! Configuration, orchestration and file formats for the `hookean` command.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod selftest;
pub mod snapshot;

pub use commands::{check_data, load_data, simulate, sweep, Status};
pub use config::{parse_config, read_config, InitKind, RunConfig, SolverKind};
pub use error::{CliError, CliResult};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
