use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mvdlm_cli::{cmd_filter, cmd_simulate, FilterArgs};

/// Matrix-variate dynamic linear model filtering with missing observations.
///
/// Exit codes: 0 success, 1 I/O error, 2 configuration or data error,
/// 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "mvdlm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Filter an observation CSV and report per-time records and MSSE.
    Filter {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
        /// new, classical or both
        #[arg(long)]
        mode: Option<String>,
        /// Per-time records; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the simulated comparison between the two update modes.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Filter {
            config,
            data,
            mode,
            out,
        } => cmd_filter(&FilterArgs {
            config,
            data,
            mode,
            out,
        }),
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
