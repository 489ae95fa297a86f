//! Command-line front end for the adverse-event corpus toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

mod cmd_ingest;
mod cmd_mix;
mod cmd_oracle;
mod cmd_score;
mod cmd_split;
mod cmd_stats;
mod common;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "aekit",
    version,
    about = "Corpus pipeline and evaluation toolkit for adverse-event NLP",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a corpus file to canonical JSONL.
    Ingest(cmd_ingest::IngestArgs),
    /// Assign stratified train/validation/test splits.
    Split(cmd_split::SplitArgs),
    /// Summarize corpora as a table or JSON rows.
    Stats(cmd_stats::StatsArgs),
    /// Draw a balanced multi-task training schedule.
    Mix(cmd_mix::MixArgs),
    /// Emit reference predictions from a gold corpus.
    Oracle(cmd_oracle::OracleArgs),
    /// Grade predictions against a gold corpus.
    Score(cmd_score::ScoreArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests print on stdout and succeed;
            // real parse errors print on stderr and exit 1.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest::run(args),
        Command::Split(args) => cmd_split::run(args),
        Command::Stats(args) => cmd_stats::run(args),
        Command::Mix(args) => cmd_mix::run(args),
        Command::Oracle(args) => cmd_oracle::run(args),
        Command::Score(args) => cmd_score::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
