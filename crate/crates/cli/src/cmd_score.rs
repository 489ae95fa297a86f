//! `aekit score`: grade a predictions file against a gold corpus.
//!
//! Prints one human-readable block per task and optionally writes the
//! full report document as JSON. With `--compare`, a second predictions
//! file is scored on the same gold and the per-record correctness
//! vectors feed a McNemar test per task.

use std::path::{Path, PathBuf};

use aekit::corpus::formats::CorpusFormat;
use aekit::corpus::{Dataset, Split};
use aekit::eval::mcnemar::{mcnemar, McNemarResult};
use aekit::eval::{correctness_vector, score_run, MetricReport};
use aekit::framing::TaskId;
use aekit::predictions::PredictionSet;
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::common::{
    dedup_tasks, load_input, open_reader, parse_format, parse_split, parse_task, print_warnings,
    write_json_document, ArtifactHeader, CliResult,
};

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Gold corpus path.
    #[arg(long)]
    pub gold: PathBuf,

    /// Corpus format; inferred from the extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<CorpusFormat>,

    /// Restrict gold to one split before scoring.
    #[arg(long, value_parser = parse_split)]
    pub split: Option<Split>,

    /// Predictions JSONL path.
    #[arg(long)]
    pub predictions: PathBuf,

    /// Task to score; repeatable. Defaults to every task in the predictions file.
    #[arg(long = "task", value_parser = parse_task)]
    pub tasks: Vec<TaskId>,

    /// Which extraction matching modes to report.
    #[arg(long, value_enum, default_value_t = ScoreMode::Both)]
    pub mode: ScoreMode,

    /// Second predictions file for a McNemar comparison.
    #[arg(long)]
    pub compare: Option<PathBuf>,

    /// Optional JSON report output path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreMode {
    Strict,
    Partial,
    Both,
}

impl ScoreMode {
    fn as_str(self) -> &'static str {
        match self {
            ScoreMode::Strict => "strict",
            ScoreMode::Partial => "partial",
            ScoreMode::Both => "both",
        }
    }
}

#[derive(Debug, Serialize)]
struct ComparisonRow {
    task: TaskId,
    #[serde(flatten)]
    result: McNemarResult,
}

fn read_predictions(path: &Path) -> CliResult<PredictionSet> {
    let reader = open_reader(path)?;
    let set = PredictionSet::read_jsonl(reader, &path.display().to_string())?;
    Ok(set)
}

fn print_report(report: &MetricReport) {
    println!("== {} on {} ==", report.task, report.dataset);
    println!(
        "  coverage: {}/{} predictions ({} missing), {} unparseable",
        report.coverage.received,
        report.coverage.expected,
        report.coverage.missing,
        report.unparseable_outputs
    );
    if let Some(classification) = &report.classification {
        println!(
            "  classification: precision {:.4} recall {:.4} f1 {:.4}",
            classification.precision, classification.recall, classification.f1
        );
        let counts = &classification.counts;
        println!(
            "  counts: tp {} fp {} fn {} tn {}",
            counts.tp, counts.fp, counts.fn_, counts.tn
        );
    }
    if let Some(strict) = &report.strict {
        println!(
            "  strict:  precision {:.4} recall {:.4} f1 {:.4} (tp {} fp {} fn {})",
            strict.precision,
            strict.recall,
            strict.f1,
            strict.counts.tp,
            strict.counts.fp,
            strict.counts.fn_
        );
    }
    if let Some(partial) = &report.partial {
        println!(
            "  partial: precision {:.4} recall {:.4} f1 {:.4} (tp {} fp {} fn {})",
            partial.precision,
            partial.recall,
            partial.f1,
            partial.counts.tp,
            partial.counts.fp,
            partial.counts.fn_
        );
    }
    if report.strict.is_some() || report.partial.is_some() {
        println!("  unfindable spans: {}", report.unfindable_spans);
    }
    if let Some(readability) = &report.prediction_readability {
        println!(
            "  prediction readability: flesch {:.2} ari {:.2} dale-chall {:.2}",
            readability.flesch_reading_ease,
            readability.automated_readability_index,
            readability.dale_chall
        );
    }
    for warning in &report.warnings {
        println!("  warning: {warning}");
    }
}

fn print_comparison(row: &ComparisonRow) {
    let significance = match row.result.significance {
        Some(level) => level.label(),
        None => "n.s.",
    };
    println!(
        "== mcnemar {} == b={} c={} chi2={:.4} significance={}",
        row.task, row.result.b, row.result.c, row.result.statistic, significance
    );
}

fn restrict_split(dataset: Dataset, split: Option<Split>, gold: &Path) -> CliResult<Dataset> {
    match split {
        Some(split) => {
            let filtered = dataset.filter_split(split)?;
            if filtered.is_empty() {
                return Err(aekit::Error::InvalidData {
                    source_name: gold.display().to_string(),
                    issues: vec![format!("no records in split {split}")],
                }
                .into());
            }
            Ok(filtered)
        }
        None => Ok(dataset),
    }
}

pub fn run(args: ScoreArgs) -> CliResult<()> {
    let (dataset, warnings) = load_input(&args.gold, args.format)?;
    print_warnings(&warnings);
    let dataset = restrict_split(dataset, args.split, &args.gold)?;

    let predictions = read_predictions(&args.predictions)?;
    let tasks = if args.tasks.is_empty() {
        let tasks: Vec<TaskId> = predictions.tasks().collect();
        if tasks.is_empty() {
            return Err(aekit::Error::InvalidData {
                source_name: args.predictions.display().to_string(),
                issues: vec!["no predictions".to_string()],
            }
            .into());
        }
        tasks
    } else {
        dedup_tasks(&args.tasks)
    };

    let mut reports = Vec::new();
    for task in &tasks {
        let mut report = score_run(&dataset, *task, &predictions)?;
        match args.mode {
            ScoreMode::Strict => report.partial = None,
            ScoreMode::Partial => report.strict = None,
            ScoreMode::Both => {}
        }
        reports.push(report);
    }

    let comparison = match &args.compare {
        Some(path) => {
            let other = read_predictions(path)?;
            let mut rows = Vec::new();
            for task in &tasks {
                let ours = correctness_vector(&dataset, *task, &predictions)?;
                let theirs = correctness_vector(&dataset, *task, &other)?;
                rows.push(ComparisonRow {
                    task: *task,
                    result: mcnemar(&ours, &theirs)?,
                });
            }
            rows
        }
        None => Vec::new(),
    };

    for report in &reports {
        print_report(report);
    }
    for row in &comparison {
        print_comparison(row);
    }

    if let Some(output) = &args.output {
        let effective = json!({
            "gold": args.gold,
            "split": args.split.map(|s| s.to_string()),
            "predictions": args.predictions,
            "mode": args.mode.as_str(),
            "compare": args.compare,
            "tasks": tasks.iter().map(|t| t.as_str()).collect::<Vec<_>>(),
        });
        let header = ArtifactHeader::new("score", &effective);
        let document = json!({
            "header": header,
            "reports": reports,
            "comparison": comparison,
        });
        write_json_document(output, &document)?;
        println!("wrote report to {}", output.display());
    }

    Ok(())
}
