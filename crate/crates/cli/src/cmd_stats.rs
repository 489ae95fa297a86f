//! `aekit stats`: per-dataset corpus statistics as a table or JSONL.

use std::path::PathBuf;

use aekit::corpus::formats::CorpusFormat;
use aekit::corpus::stats::dataset_stats;
use clap::Args;

use crate::common::{load_input, parse_format, print_warnings, CliResult};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus file; repeat the flag to compare several datasets.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,

    /// Format applied to every input; inferred per file when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<CorpusFormat>,

    /// Emit one JSON object per dataset instead of the aligned table.
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: StatsArgs) -> CliResult<()> {
    let mut rows = Vec::new();
    for input in &args.inputs {
        let (dataset, warnings) = load_input(input, args.format)?;
        print_warnings(&warnings);
        rows.push(dataset_stats(&dataset));
    }

    if args.json {
        for row in &rows {
            println!(
                "{}",
                serde_json::to_string(row).expect("stats row serializes")
            );
        }
        return Ok(());
    }

    let tables: Vec<Vec<(&str, String)>> = rows.iter().map(|row| row.cells()).collect();
    let columns = tables[0].len();
    let mut widths: Vec<usize> = tables[0].iter().map(|(name, _)| name.len()).collect();
    for cells in &tables {
        for (i, (_, value)) in cells.iter().enumerate() {
            widths[i] = widths[i].max(value.len());
        }
    }
    let header: Vec<String> = tables[0]
        .iter()
        .enumerate()
        .map(|(i, (name, _))| format!("{:width$}", name, width = widths[i]))
        .collect();
    println!("{}", header.join("  ").trim_end());
    for cells in &tables {
        let row: Vec<String> = (0..columns)
            .map(|i| format!("{:width$}", cells[i].1, width = widths[i]))
            .collect();
        println!("{}", row.join("  ").trim_end());
    }
    Ok(())
}
