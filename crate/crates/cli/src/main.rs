use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use stegofuse_cli::commands::{self, default_workers, Command};
use stegofuse_cli::{parse_args, run_pipeline, ExitStatus};

/// Detect LSB-replacement steganography in a directory of lossless images.
///
/// Without a subcommand the arguments are positional: a directory, then
/// optionally the speed (standard or fast), the threshold (0 to 1, or
/// "default" for 0.2) and a CSV file for the full report. Later arguments
/// need all earlier ones.
#[derive(Debug, Parser)]
#[command(
    name = "stegofuse",
    version,
    args_conflicts_with_subcommands = true,
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[arg(value_name = "DIRECTORY [SPEED] [THRESHOLD] [CSV FILE]", num_args = 0..)]
    positionals: Vec<String>,

    /// Worker threads for analysis; 1 analyses on the main thread.
    #[arg(short = 'j', long, global = true)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(ExitStatus::Usage.code()),
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut diag = io::stderr();

    if let Some(command) = cli.command {
        return finish(commands::run(command, cli.jobs, &mut out), &mut diag);
    }

    let parsed = match parse_args(&cli.positionals) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(
                diag,
                "error: {e}\nusage: stegofuse <directory> [speed] [threshold] [csv file]"
            );
            return ExitCode::from(ExitStatus::Usage.code());
        }
    };
    for w in &parsed.warnings {
        let _ = writeln!(diag, "warning: {w}");
    }
    let workers = cli.jobs.unwrap_or_else(default_workers).max(1);
    let (status, _) = run_pipeline(&parsed.args, workers, &mut out, &mut diag);
    ExitCode::from(status.code())
}

fn finish(result: anyhow::Result<()>, diag: &mut dyn Write) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(diag, "error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
