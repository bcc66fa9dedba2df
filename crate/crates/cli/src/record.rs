//! Result records, one JSON object per line.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use recur_core::kronecker::{KroneckerQuery, TauWindow};
use recur_core::scanner::{DemoReport, DensityEstimate, KsReport, LiminfProxy};
use recur_core::torus::MassEstimate;
use recur_core::zeta::CompactRect;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub schema_version: u32,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub command: String,
    /// The fully resolved configuration; re-running it reproduces `payload`.
    pub config: RunConfig,
    pub payload: Payload,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Density(DensityEstimate),
    Curve(CurveReport),
    Windows(WindowReport),
    Witness(WitnessSummary),
    Ks(KsReport),
    Demo(DemoReport),
}

impl Payload {
    pub fn failures(&self) -> usize {
        match self {
            Payload::Density(e) => e.failures,
            Payload::Curve(c) => c.estimates.iter().map(|e| e.failures).sum(),
            Payload::Ks(k) => k.failures,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub estimates: Vec<DensityEstimate>,
    pub liminf: LiminfProxy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub query: KroneckerQuery,
    /// `scan` or `lattice`.
    pub mode: String,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<f64>,
    pub windows: Vec<TauWindow>,
    pub total_measure: f64,
    /// `total_measure / T` for scans.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure_fraction: Option<f64>,
    pub theoretical_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    #[serde(rename = "K")]
    pub k_rect: CompactRect,
    pub eps: f64,
    pub j: i64,
    pub k: i64,
    pub truncation: usize,
    pub support_size: usize,
    pub sup_norm: f64,
    /// Sup on the twice refined grid.
    pub refined_sup: f64,
    pub analytic_bound: Option<f64>,
    pub heuristic: bool,
    pub mass: Option<MassEstimate>,
}

impl ResultRecord {
    pub fn new(command: &str, config: RunConfig, payload: Payload) -> Self {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            timestamp: chrono::Utc::now().to_rfc3339(),
            command: command.to_string(),
            config,
            failures: payload.failures(),
            payload,
        }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Appends one line to `path`, creating parent directories.
pub fn append_record(path: &Path, record: &ResultRecord) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let line = serde_json::to_string(record).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io(path))?;
    writeln!(f, "{line}").map_err(io(path))
}

/// Reads every record of a results file; other schema versions are rejected.
pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>, CliError> {
    let f = std::fs::File::open(path).map_err(io(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let origin = format!("{}:{}", path.display(), i + 1);
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| CliError::Config {
            path: origin.clone(),
            detail: e.to_string(),
        })?;
        let version = value.get("schema_version").and_then(|v| v.as_u64());
        if version != Some(SCHEMA_VERSION as u64) {
            return Err(CliError::Config {
                path: origin,
                detail: format!("schema version {version:?}, expected {SCHEMA_VERSION}"),
            });
        }
        let rec = serde_path_to_error::deserialize(value).map_err(|e| CliError::Config {
            path: origin,
            detail: format!("at `{}`: {}", e.path(), e.inner()),
        })?;
        out.push(rec);
    }
    Ok(out)
}
