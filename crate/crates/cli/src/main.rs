use std::path::PathBuf;
use std::process::ExitCode;

use boltseq_cli::{execute, parse_config, write_output, CliError, Command};
use clap::{Args, Parser, Subcommand};

/// Plan one-pass bolt tightening sequences for circular flanges.
#[derive(Parser)]
#[command(name = "boltseq", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides output.dir from the config.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Do not print the report to stdout.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measure the four interaction coefficients with the two-step protocol.
    Coefficients(Common),
    /// Build the interaction matrix with each configured method.
    Matrix(Common),
    /// Compute initial loads that reach the target in one pass.
    Optimize(Common),
    /// Run an initial-load file through the bench.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Loads file with bolt_id, position, order and initial_kn columns.
        #[arg(short, long)]
        loads: PathBuf,
    },
    /// Optimize, then check the plan on the bench.
    Validate(Common),
    /// Run every configured coefficient set and pattern.
    Sweep(Common),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, common) = match cli.command {
        Cmd::Coefficients(c) => (Command::Coefficients, c),
        Cmd::Matrix(c) => (Command::Matrix, c),
        Cmd::Optimize(c) => (Command::Optimize, c),
        Cmd::Simulate { common, loads } => (Command::Simulate { loads }, common),
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
    };
    let cfg = parse_config(&common.config)?;
    let output = execute(&command, &cfg)?;
    let dir = common.out.unwrap_or_else(|| cfg.output_dir.clone());
    write_output(&output, &dir, cfg.format)?;
    if !common.quiet {
        print!("{}", output.rendered_report(cfg.format).1);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
