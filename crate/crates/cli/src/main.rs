use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;

use config::ConfigArgs;

#[derive(Debug, Parser)]
#[command(
    name = "thermal-vitals",
    version,
    about = "Heart and respiration rate from thermal frame sequences"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a sequence from a JSON or TOML spec.
    Gen(commands::gen::GenArgs),
    /// Track an ROI through a sequence.
    Track(commands::track::TrackArgs),
    /// Estimate a vital rate over sliding windows.
    Estimate(commands::estimate::EstimateArgs),
    /// Score estimates against ground truth.
    Evaluate(commands::evaluate::EvaluateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => commands::gen::run(a, &cli.config),
        Command::Track(a) => commands::track::run(a, &cli.config),
        Command::Estimate(a) => commands::estimate::run(a, &cli.config),
        Command::Evaluate(a) => commands::evaluate::run(a, &cli.config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
