use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dilators_cli::{run, Command};

/// Batch front door for the dilator calculus.
#[derive(Parser)]
#[command(name = "dilators", version, about)]
struct Cli {
    /// emit one structured JSON document instead of plain lines
    #[arg(long, global = true)]
    json: bool,
    /// write the report to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            let body = if cli.json { report.json() } else { report.text() };
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &body) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{body}");
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "exit": e.exit_code() })
                );
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
