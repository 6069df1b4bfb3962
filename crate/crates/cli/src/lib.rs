//! Command-line front end: configuration, report rendering, and the
//! L-polynomial cache.
//!
//! Every artifact starts with a provenance header recording the full run
//! configuration and the code version. Failures map to fixed exit codes:
//! 2 for configuration errors, 3 for infeasible sizes, 4 for violated
//! invariants and 5 for cache errors.

pub mod cache;
pub mod commands;
pub mod config;
pub mod curves;
pub mod error;
pub mod output;

pub use config::Cli;
pub use error::{CliError, CliResult};

use config::Provenance;
use output::Artifact;

/// Runs a parsed command and returns its artifact without writing it.
pub fn build_artifact(cli: &Cli) -> CliResult<Artifact> {
    let run = || commands::run(cli);
    let rows = match cli.global.threads {
        Some(0) => return Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Artifact::new(Provenance::new(cli), rows)
}

/// Runs a parsed command and writes its artifact.
pub fn execute(cli: &Cli) -> CliResult<()> {
    build_artifact(cli)?.write(cli.global.format, cli.global.out.as_deref())
}
