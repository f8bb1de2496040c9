//! Command-line front end for `twistor-core`: JSON configs, file formats,
//! parallel sweeps and the five subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::path::{Path, PathBuf};

pub use commands::{RunOutcome, RESOLVED_CONFIG};
pub use config::{Command, RunConfig};
pub use error::AppError;

/// Output directory when neither `--out` nor `output_dir` is given.
pub const DEFAULT_OUTPUT_DIR: &str = "twistorsolve-out";

/// Loads and validates `config_path`, then runs `command` with `jobs`
/// worker threads. `out` overrides the config's `output_dir`.
pub fn execute(command: Command, config_path: &Path, jobs: usize, out: Option<&Path>) -> Result<RunOutcome, AppError> {
    let text = io::read_text(config_path)?;
    let config = RunConfig::from_json(&text, command)?;
    let out: PathBuf = match (out, &config.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => PathBuf::from(o),
        (None, None) => PathBuf::from(DEFAULT_OUTPUT_DIR),
    };
    let base_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let ctx = commands::Context {
        config: &config,
        hash: config.hash(),
        out: &out,
        base_dir,
        pool: commands::thread_pool(jobs)?,
    };
    commands::run(&ctx)
}
