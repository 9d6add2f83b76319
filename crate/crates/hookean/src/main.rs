use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hookean::{read_config, CliError, CliResult, RunConfig, Status};

#[derive(Parser)]
#[command(name = "hookean", version, about = "Incompressible Hookean elastodynamics on the periodic torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and write diagnostics, summary and snapshots.
    Simulate(RunArgs),
    /// Picard runs over a list of amplitudes.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated amplitudes, at least three.
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
    },
    /// Print the compatibility residuals of the configured data.
    CheckData(RunArgs),
    /// Run the small-grid invariant suites.
    Selftest,
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Overrides `output_dir`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, short)]
    quiet: bool,
}

impl RunArgs {
    fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = read_config(&self.config)?;
        if let Some(out) = &self.output {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<Status> {
    match cli.command {
        Command::Simulate(args) => hookean::simulate(&args.load()?, args.quiet),
        Command::Sweep { run, epsilons } => hookean::sweep(&run.load()?, &epsilons, run.quiet),
        Command::CheckData(args) => Ok(hookean::check_data(&args.load()?)?.0),
        Command::Selftest => {
            let mut ok = true;
            for (name, result) in hookean::selftest::run_suites() {
                match result {
                    Ok(()) => println!("PASS {name}"),
                    Err(e) => {
                        ok = false;
                        println!("FAIL {name}: {e}");
                    }
                }
            }
            if ok {
                Ok(Status::Converged)
            } else {
                Err(CliError::Usage("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for non-convergence
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
