//! `viseval`: batch corruption, reconstruction scoring, and reporting for
//! speech-video clips.
//!
//! Exit codes: 0 full success, 1 partial (some clips skipped; see stderr),
//! 2 usage or setup error.

mod commands;
mod common;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::Outcome;

#[derive(Parser)]
#[command(
    name = "viseval",
    version,
    about = "Corruption generation and viseme-aware evaluation for speech-video frame interpolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one of the six challenge corruptions over a corpus
    Corrupt(commands::corrupt::CorruptArgs),
    /// Score reconstructions against originals, full-frame and ROI
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Find visemically equivalent word pairs in a lexicon
    Pairs(commands::pairs::PairsArgs),
    /// Build two-frame freeze synthetics for the metric-deficiency demo
    Synth(commands::synth::SynthArgs),
    /// Print corpus statistics (speakers, utterances, words, vocabulary)
    Stats(commands::stats::StatsArgs),
    /// Aggregate per-clip reports into a grouped table
    Report(commands::report::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Corrupt(args) => commands::corrupt::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Pairs(args) => commands::pairs::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    match outcome {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Partial(skipped)) => {
            eprintln!("{skipped} clip(s) skipped with errors");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
