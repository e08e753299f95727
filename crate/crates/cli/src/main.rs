use std::process::ExitCode;

use clap::Parser;
use tqss_cli::commands::execute;
use tqss_cli::config::{Cli, Format};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((report, format)) => {
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Structured => print!("{}", report.to_structured()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tqss: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
