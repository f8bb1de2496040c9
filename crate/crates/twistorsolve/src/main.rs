use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twistorsolve::{execute, Command};

/// Twistor solver for the (A,B,C) wave equation.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory, overriding `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TWISTORSOLVE_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(cli.command, &cli.config, cli.jobs, cli.out.as_deref()) {
        Ok(outcome) => {
            for p in &outcome.written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
