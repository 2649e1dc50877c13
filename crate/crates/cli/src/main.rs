use std::process::ExitCode;

use clap::Parser;
use lpgpd_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = run(&cli);
    match serde_json::to_string_pretty(&report) {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("error: could not serialize report: {e}");
            return ExitCode::from(3);
        }
    }
    if let Some(err) = &report.error {
        eprintln!("error: {}", err.message);
    }
    ExitCode::from(code as u8)
}
