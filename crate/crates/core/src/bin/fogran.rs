use std::process::ExitCode;

use clap::Parser;
use fogran::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fogran: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
