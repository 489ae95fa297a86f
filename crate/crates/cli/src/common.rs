//! Shared plumbing: exit-code mapping, artifact headers, file helpers.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use aekit::corpus::formats::{load_dataset, CorpusFormat};
use aekit::corpus::{Dataset, Split};
use aekit::framing::TaskId;
use aekit::mixer::{Balancing, MixStrategy};
use aekit::oracle::OracleKind;

/// Failure classes, each tied to one exit code: 1 for argument problems,
/// 2 for bad or unreadable data, 3 when a library invariant broke.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(aekit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(err) if err.is_internal() => 3,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(detail) => write!(f, "{detail}"),
            CliError::Data(err) => write!(f, "{err}"),
        }
    }
}

impl From<aekit::Error> for CliError {
    fn from(err: aekit::Error) -> CliError {
        CliError::Data(err)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(detail: impl Into<String>) -> CliError {
    CliError::Usage(detail.into())
}

/// First line of every JSONL artifact, also embedded in JSON reports.
/// Deterministic given the command and its effective configuration, so
/// re-running a command reproduces artifacts byte for byte.
#[derive(Debug, Serialize)]
pub struct ArtifactHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// SHA-256 over the resolved configuration JSON.
    pub config_hash: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub seeds: BTreeMap<&'static str, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl ArtifactHeader {
    pub fn new(command: &'static str, effective_config: &impl Serialize) -> ArtifactHeader {
        ArtifactHeader {
            tool: "aekit",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash: config_hash(effective_config),
            seeds: BTreeMap::new(),
            details: None,
        }
    }

    pub fn with_seed(mut self, name: &'static str, seed: u64) -> ArtifactHeader {
        self.seeds.insert(name, seed);
        self
    }

    pub fn with_details(mut self, details: serde_json::Value) -> ArtifactHeader {
        self.details = Some(details);
        self
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("header serializes")
    }
}

pub fn config_hash(config: &impl Serialize) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&canonical)
        .iter()
        .map(|byte| format!("{byte:02x}"))
        .collect()
}

pub fn open_reader(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|err| aekit::Error::io(path, err).into())
}

pub fn create_writer(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|err| aekit::Error::io(path, err))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|err| aekit::Error::io(path, err).into())
}

/// Resolves the corpus format, inferring from the extension unless given.
pub fn resolve_format(path: &Path, format: Option<CorpusFormat>) -> CliResult<CorpusFormat> {
    match format {
        Some(format) => Ok(format),
        None => CorpusFormat::infer(path).ok_or_else(|| {
            usage(format!(
                "cannot infer corpus format from {}; pass --format",
                path.display()
            ))
        }),
    }
}

/// Loads one corpus, inferring the format from the extension unless given.
pub fn load_input(path: &Path, format: Option<CorpusFormat>) -> CliResult<(Dataset, Vec<String>)> {
    let format = resolve_format(path, format)?;
    Ok(load_dataset(path, format)?)
}

/// Writes a header line followed by one line per item.
pub fn write_jsonl_artifact(
    path: &Path,
    header: &ArtifactHeader,
    lines: impl IntoIterator<Item = String>,
) -> CliResult<()> {
    let mut writer = create_writer(path)?;
    let io_result = (|| {
        writeln!(writer, "{}", header.to_line())?;
        for line in lines {
            writeln!(writer, "{line}")?;
        }
        writer.flush()
    })();
    io_result.map_err(|err| aekit::Error::io(path, err).into())
}

/// Writes one pretty-printed JSON document with a trailing newline.
pub fn write_json_document(path: &Path, document: &impl serde::Serialize) -> CliResult<()> {
    let mut writer = create_writer(path)?;
    serde_json::to_writer_pretty(&mut writer, document)
        .map_err(|err| aekit::Error::io(path, err.into()))?;
    writer
        .write_all(b"\n")
        .and_then(|()| writer.flush())
        .map_err(|err| aekit::Error::io(path, err).into())
}

pub fn print_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

// FromStr-backed value parsers for clap.

pub fn parse_format(s: &str) -> Result<CorpusFormat, String> {
    s.parse().map_err(|err: aekit::Error| err.to_string())
}

pub fn parse_task(s: &str) -> Result<TaskId, String> {
    s.parse().map_err(|err: aekit::Error| err.to_string())
}

pub fn parse_split(s: &str) -> Result<Split, String> {
    s.parse().map_err(|err: aekit::Error| err.to_string())
}

pub fn parse_strategy(s: &str) -> Result<MixStrategy, String> {
    s.parse().map_err(|err: aekit::Error| err.to_string())
}

pub fn parse_balancing(s: &str) -> Result<Balancing, String> {
    s.parse().map_err(|err: aekit::Error| err.to_string())
}

pub fn parse_oracle_kind(s: &str) -> Result<OracleKind, String> {
    s.parse().map_err(|err: aekit::Error| err.to_string())
}

/// Keeps the first occurrence of each task, preserving flag order.
pub fn dedup_tasks(tasks: &[TaskId]) -> Vec<TaskId> {
    let mut seen = Vec::new();
    for &task in tasks {
        if !seen.contains(&task) {
            seen.push(task);
        }
    }
    seen
}
