//! Command-line runs over the `dirac_shell` library, emitting CSV or JSON with
//! an embedded run manifest.

// negated comparisons are how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod checks;
pub mod eigenfunction;
pub mod error;
pub mod line;
pub mod output;
pub mod spectrum;
pub mod verify;

pub use error::{CliError, CliResult};

#[cfg(test)]
mod tests;

use args::{Cli, Command};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Spectrum(a) => spectrum::run(a),
        Command::Eigenfunction(a) => eigenfunction::run(a),
        Command::Line(a) => line::run(a),
        Command::Verify(a) => verify::run(a),
    }
}

/// Caps the rayon pool at `DIRAC_SHELL_THREADS` when it is set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("DIRAC_SHELL_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Invalid(format!(
            "DIRAC_SHELL_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))
}
