use std::process::ExitCode;

use clap::Parser;
use membrane_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}
