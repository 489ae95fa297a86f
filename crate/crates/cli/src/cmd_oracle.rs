//! `aekit oracle`: emit reference predictions from a gold corpus.
//!
//! Echo copies the target verbatim, majority always answers with the
//! majority class, and noisy-echo corrupts a seeded fraction of outputs.
//! Useful for validating scoring end to end before real model runs exist.

use std::path::PathBuf;

use aekit::corpus::formats::CorpusFormat;
use aekit::corpus::Split;
use aekit::framing::{render_dataset, TaskId};
use aekit::oracle::{run_oracle, OracleKind, OracleSpec};
use clap::Args;
use serde_json::json;

use crate::common::{
    dedup_tasks, load_input, parse_format, parse_oracle_kind, parse_split, parse_task,
    print_warnings, usage, write_jsonl_artifact, ArtifactHeader, CliResult,
};

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Gold corpus path.
    #[arg(long)]
    pub gold: PathBuf,

    /// Corpus format; inferred from the extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<CorpusFormat>,

    /// Restrict to one split (train, validation, test, test_only).
    #[arg(long, value_parser = parse_split)]
    pub split: Option<Split>,

    /// Task to answer; repeatable. Defaults to every task the corpus supports.
    #[arg(long = "task", value_parser = parse_task)]
    pub tasks: Vec<TaskId>,

    /// echo, majority, or noisy_echo.
    #[arg(long, value_parser = parse_oracle_kind)]
    pub kind: OracleKind,

    /// Corruption probability for noisy_echo (0 to 1).
    #[arg(long)]
    pub rate: Option<f64>,

    /// Corruption seed for noisy_echo.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Predictions JSONL output path.
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: OracleArgs) -> CliResult<()> {
    if args.kind != OracleKind::NoisyEcho {
        if args.rate.is_some() {
            return Err(usage("--rate only applies to --kind noisy_echo"));
        }
        if args.seed.is_some() {
            return Err(usage("--seed only applies to --kind noisy_echo"));
        }
    }
    let spec = match args.kind {
        OracleKind::Echo => OracleSpec::echo(),
        OracleKind::Majority => OracleSpec::majority(),
        OracleKind::NoisyEcho => {
            let rate = args
                .rate
                .ok_or_else(|| usage("--kind noisy_echo requires --rate"))?;
            OracleSpec::noisy_echo(rate, args.seed.unwrap_or(0))
        }
    };
    spec.validate()?;

    let (dataset, warnings) = load_input(&args.gold, args.format)?;
    print_warnings(&warnings);
    let dataset = match args.split {
        Some(split) => {
            let filtered = dataset.filter_split(split)?;
            if filtered.is_empty() {
                return Err(aekit::Error::InvalidData {
                    source_name: args.gold.display().to_string(),
                    issues: vec![format!("no records in split {split}")],
                }
                .into());
            }
            filtered
        }
        None => dataset,
    };

    let tasks = if args.tasks.is_empty() {
        dataset.manifest().capabilities.iter().copied().collect()
    } else {
        dedup_tasks(&args.tasks)
    };

    let mut instances = Vec::new();
    for task in &tasks {
        instances.extend(render_dataset(&dataset, *task, None)?);
    }
    let predictions = run_oracle(&spec, &instances)?;

    let effective = json!({
        "gold": args.gold,
        "split": args.split.map(|s| s.to_string()),
        "tasks": tasks.iter().map(|t| t.as_str()).collect::<Vec<_>>(),
        "oracle": spec,
        "output": args.output,
    });
    let mut header = ArtifactHeader::new("oracle", &effective);
    if args.kind == OracleKind::NoisyEcho {
        header = header.with_seed("oracle", spec.seed);
    }
    write_jsonl_artifact(
        &args.output,
        &header,
        predictions
            .iter()
            .map(|p| serde_json::to_string(&p).expect("prediction serializes")),
    )?;

    println!(
        "wrote {} predictions ({} tasks) to {}",
        predictions.len(),
        tasks.len(),
        args.output.display()
    );
    Ok(())
}
