use std::process::ExitCode;

use clap::Parser;
use kgpilot_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            for n in &outcome.notes {
                println!("{n}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kgpilot: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
