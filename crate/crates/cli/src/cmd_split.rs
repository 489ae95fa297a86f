//! `aekit split`: assign stratified train/validation/test splits.

use std::path::PathBuf;

use aekit::corpus::formats::{canonical_line, CorpusFormat};
use aekit::corpus::split::{stratified_split, SplitRatios};
use aekit::corpus::Split;
use clap::Args;
use serde_json::json;

use crate::common::{
    load_input, parse_format, print_warnings, resolve_format, usage, write_jsonl_artifact,
    ArtifactHeader, CliResult,
};

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Input corpus file.
    #[arg(long)]
    pub input: PathBuf,

    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<CorpusFormat>,

    /// Train fraction.
    #[arg(long, default_value_t = 0.8)]
    pub train: f64,

    /// Validation fraction.
    #[arg(long, default_value_t = 0.1)]
    pub validation: f64,

    /// Test fraction. The three fractions must sum to 1.
    #[arg(long, default_value_t = 0.1)]
    pub test: f64,

    /// Shuffle seed; the split is a pure function of corpus and seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Canonical JSONL output path (records carry their split).
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: SplitArgs) -> CliResult<()> {
    let ratios = SplitRatios::new(args.train, args.validation, args.test)
        .map_err(|err| usage(err.to_string()))?;
    let format = resolve_format(&args.input, args.format)?;
    let (dataset, warnings) = load_input(&args.input, Some(format))?;
    print_warnings(&warnings);
    let split = stratified_split(&dataset, &ratios, args.seed)?;

    let effective = json!({
        "input": args.input,
        "format": format.as_str(),
        "ratios": [args.train, args.validation, args.test],
        "seed": args.seed,
        "output": args.output,
    });
    let header = ArtifactHeader::new("split", &effective).with_seed("split", args.seed);
    write_jsonl_artifact(
        &args.output,
        &header,
        split.records().iter().map(canonical_line),
    )?;

    for bucket in [Split::Train, Split::Validation, Split::Test] {
        if let Some(counts) = split.manifest().splits.get(&bucket) {
            println!(
                "{bucket}: {} records ({} positive, {} negative, {} unlabeled)",
                counts.total,
                counts.positive,
                counts.negative,
                counts.unlabeled()
            );
        }
    }
    println!("wrote {} records to {}", split.len(), args.output.display());
    Ok(())
}
