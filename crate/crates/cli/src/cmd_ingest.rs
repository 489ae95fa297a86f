//! `aekit ingest`: normalize any supported corpus format to canonical JSONL.

use std::path::PathBuf;

use aekit::corpus::formats::{canonical_line, CorpusFormat};
use clap::Args;
use serde_json::json;

use crate::common::{
    load_input, parse_format, print_warnings, resolve_format, write_json_document,
    write_jsonl_artifact, ArtifactHeader, CliResult,
};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Input corpus file (canonical JSONL, IOB tokens, or span TSV).
    #[arg(long)]
    pub input: PathBuf,

    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<CorpusFormat>,

    /// Dataset id for the output; defaults to the id derived from the input.
    #[arg(long)]
    pub dataset_id: Option<String>,

    /// Canonical JSONL output path.
    #[arg(long)]
    pub output: PathBuf,

    /// Optional path for the dataset manifest as a JSON document.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

pub fn run(args: IngestArgs) -> CliResult<()> {
    let format = resolve_format(&args.input, args.format)?;
    let (dataset, warnings) = load_input(&args.input, Some(format))?;
    print_warnings(&warnings);
    let dataset = match &args.dataset_id {
        Some(id) => dataset.renamed(id.clone())?,
        None => dataset,
    };

    let effective = json!({
        "input": args.input,
        "format": format.as_str(),
        "dataset_id": dataset.id(),
        "output": args.output,
    });
    let header = ArtifactHeader::new("ingest", &effective).with_details(json!({
        "manifest": dataset.manifest(),
    }));
    write_jsonl_artifact(
        &args.output,
        &header,
        dataset.records().iter().map(canonical_line),
    )?;
    if let Some(path) = &args.manifest {
        write_json_document(path, dataset.manifest())?;
    }

    let capabilities: Vec<&str> = dataset
        .manifest()
        .capabilities
        .iter()
        .map(|task| task.as_str())
        .collect();
    println!(
        "ingested {} records as dataset {:?} into {}",
        dataset.len(),
        dataset.id(),
        args.output.display()
    );
    println!(
        "supported tasks: {}",
        if capabilities.is_empty() {
            "none".to_string()
        } else {
            capabilities.join(", ")
        }
    );
    Ok(())
}
