use std::process::ExitCode;

use clap::Parser;
use dirac_shell_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dirac_shell_cli::configure_threads().and_then(|()| dirac_shell_cli::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirac-shell: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
