use std::process::ExitCode;

use clap::Parser;

use pvbounds_cli::commands::{run, Cli};

fn main() -> ExitCode {
    // Usage errors exit with status 2 from inside `parse`.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
