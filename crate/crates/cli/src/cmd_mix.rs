//! `aekit mix`: draw a balanced multi-task training schedule.
//!
//! Datasets come from a TOML config or repeated `--input` flags; scalar
//! settings resolve flag > config file > default. The schedule artifact
//! records the mixture weights in its header, so a run is fully
//! reproducible from the file alone.

use std::path::{Path, PathBuf};

use aekit::corpus::formats::CorpusFormat;
use aekit::corpus::Dataset;
use aekit::mixer::schedule::sample_schedule;
use aekit::mixer::{
    build_weights, Balancing, MixStrategy, MixerConfig, DEFAULT_GAMMA, DEFAULT_TEMPERATURE,
};
use clap::Args;
use serde::Deserialize;
use serde_json::json;

use crate::common::{
    load_input, parse_balancing, parse_strategy, print_warnings, usage, write_json_document,
    write_jsonl_artifact, ArtifactHeader, CliError, CliResult,
};

#[derive(Debug, Args)]
pub struct MixArgs {
    /// TOML mixing config (see `MixFile` fields).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Training corpus (canonical JSONL with assigned splits); repeatable.
    /// Mutually exclusive with datasets listed in the config file.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,

    /// proportional_mixing (pm) or temperature_scaling (ts).
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<MixStrategy>,

    /// task_only (tb) or task_and_dataset (tdb).
    #[arg(long, value_parser = parse_balancing)]
    pub balancing: Option<Balancing>,

    /// Temperature for temperature_scaling; must be >= 1.
    #[arg(long)]
    pub temperature: Option<f64>,

    /// Cap on per-task and per-dataset counts when balancing.
    #[arg(long)]
    pub gamma: Option<u64>,

    /// Sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Number of instances to draw.
    #[arg(long)]
    pub length: Option<u64>,

    /// Schedule JSONL output path.
    #[arg(long)]
    pub output: PathBuf,

    /// Optional path for the resolved weights as a JSON document.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

/// On-disk mixing config. Every field is optional so flags can fill gaps;
/// unknown keys are rejected to catch typos.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixFile {
    strategy: Option<MixStrategy>,
    balancing: Option<Balancing>,
    temperature: Option<f64>,
    gamma: Option<u64>,
    seed: Option<u64>,
    length: Option<u64>,
    #[serde(default)]
    datasets: Vec<MixInput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixInput {
    path: PathBuf,
    format: Option<String>,
}

fn read_mix_file(path: &Path) -> CliResult<MixFile> {
    let text = std::fs::read_to_string(path).map_err(|err| aekit::Error::io(path, err))?;
    toml::from_str(&text).map_err(|err| {
        CliError::Data(aekit::Error::InvalidConfig {
            detail: format!("{}: {err}", path.display()),
        })
    })
}

fn load_mix_datasets(args: &MixArgs, file: &MixFile) -> CliResult<Vec<Dataset>> {
    if !file.datasets.is_empty() && !args.inputs.is_empty() {
        return Err(usage(
            "datasets come from either the config file or --input flags, not both",
        ));
    }
    let mut datasets = Vec::new();
    for input in &file.datasets {
        let format = input
            .format
            .as_deref()
            .map(|s| s.parse::<CorpusFormat>())
            .transpose()?;
        let (dataset, warnings) = load_input(&input.path, format)?;
        print_warnings(&warnings);
        datasets.push(dataset);
    }
    for path in &args.inputs {
        let (dataset, warnings) = load_input(path, None)?;
        print_warnings(&warnings);
        datasets.push(dataset);
    }
    if datasets.is_empty() {
        return Err(usage(
            "no datasets given; list them in the config file or pass --input",
        ));
    }
    Ok(datasets)
}

pub fn run(args: MixArgs) -> CliResult<()> {
    let file = match &args.config {
        Some(path) => read_mix_file(path)?,
        None => MixFile::default(),
    };
    let datasets = load_mix_datasets(&args, &file)?;

    let config = MixerConfig {
        strategy: args
            .strategy
            .or(file.strategy)
            .unwrap_or(MixStrategy::TemperatureScaling),
        balancing: args
            .balancing
            .or(file.balancing)
            .unwrap_or(Balancing::TaskAndDataset),
        temperature: args
            .temperature
            .or(file.temperature)
            .unwrap_or(DEFAULT_TEMPERATURE),
        gamma: args.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
        seed: args.seed.or(file.seed).unwrap_or(0),
        length: args
            .length
            .or(file.length)
            .ok_or_else(|| usage("--length (or `length` in the config file) is required"))?,
    };
    config.validate().map_err(|err| usage(err.to_string()))?;

    let manifests: Vec<_> = datasets.iter().map(|d| d.manifest().clone()).collect();
    let weights = build_weights(&manifests, &config)?;
    let schedule = sample_schedule(&datasets, &weights, config.seed, config.length)?;

    let effective = json!({
        "datasets": datasets.iter().map(|d| d.id()).collect::<Vec<_>>(),
        "config": config,
    });
    let header = ArtifactHeader::new("mix", &effective)
        .with_seed("mix", config.seed)
        .with_details(json!({
            "weights": weights,
        }));
    write_jsonl_artifact(
        &args.output,
        &header,
        schedule
            .iter()
            .map(|instance| serde_json::to_string(instance).expect("instance serializes")),
    )?;
    if let Some(path) = &args.weights {
        write_json_document(path, &weights)?;
    }

    println!("task weights (theta):");
    for (task, weight) in &weights.theta {
        println!("  {task} {weight:.6}");
    }
    println!("dataset weights within each task (rho):");
    for (task, per_dataset) in &weights.rho {
        for (dataset, weight) in per_dataset {
            println!("  {task} / {dataset} {weight:.6}");
        }
    }
    println!(
        "wrote {} instances to {}",
        schedule.len(),
        args.output.display()
    );
    Ok(())
}
