use std::path::PathBuf;
use std::process::ExitCode;

use bergtoric::commands::{cmd_christ, cmd_decay, cmd_kernel, cmd_lattice, cmd_qnorms};
use bergtoric::validate::cmd_validate;
use bergtoric::{CliError, ExperimentConfig, Report};
use clap::{ArgAction, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bergtoric", version, about = "Bergman and Berezin kernels of toric line bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// More log output (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    /// Errors only.
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(clap::Args)]
struct Run {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// Dotted-path overrides such as `grid.k=[2,4]` or `pairs.0.rho1=[0.5]`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice points of kP for every k in the grid.
    Lattice(Run),
    /// Norm tables, cached.
    Qnorms(Run),
    /// Bergman and Berezin kernel values for the configured pairs.
    Kernel(Run),
    /// Decay rates, fits and upper-bound checks.
    Decay(Run),
    /// Kernels of the weighted spaces on ℂ^m.
    Christ(Run),
    /// Convexity, derivative, identity and closed-form checks.
    Validate(Run),
}

fn run(command: &Command) -> Result<Report, CliError> {
    let (run, f): (&Run, fn(&ExperimentConfig) -> Result<Report, CliError>) = match command {
        Command::Lattice(r) => (r, cmd_lattice),
        Command::Qnorms(r) => (r, cmd_qnorms),
        Command::Kernel(r) => (r, cmd_kernel),
        Command::Decay(r) => (r, cmd_decay),
        Command::Christ(r) => (r, cmd_christ),
        Command::Validate(r) => (r, cmd_validate),
    };
    let cfg = ExperimentConfig::load(&run.config, &run.overrides)?;
    f(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "error",
        (false, 0) => "warn",
        (false, 1) => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli.command) {
        Ok(report) => {
            for path in &report.written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.to_exit_code()
        }
    }
}
