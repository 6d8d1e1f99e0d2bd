use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use incidence_cli::{run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(report.stdout.as_bytes()).is_err() {
                return ExitCode::from(EXIT_ERROR);
            }
            ExitCode::from(report.status)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
