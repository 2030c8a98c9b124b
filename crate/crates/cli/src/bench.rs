//! Time-to-first-implicate measurements over a list of problems.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use pimt_core::abducibles::GenerateOptions;
use pimt_core::engine::{search, EngineConfig, ResultPredicate};
use pimt_core::oracle::Backend;
use serde::Deserialize;

use crate::setup::{prepare, AbducibleSource};

/// Upper bounds of the time buckets, in seconds; slower or failed runs land
/// in `none`.
pub const BUCKETS: [(f64, &str); 7] = [
    (0.5, "[0,0.5)"),
    (1.0, "[0.5,1)"),
    (1.5, "[1,1.5)"),
    (2.0, "[1.5,2)"),
    (5.0, "[2,5)"),
    (10.0, "[5,10)"),
    (35.0, "[10,35)"),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Per-run budget in seconds.
    #[serde(default = "default_timeout")]
    pub timeout: f64,
    #[serde(default = "default_size_limits")]
    pub size_limits: Vec<usize>,
    #[serde(default = "default_depth")]
    pub abduce_depth: usize,
    #[serde(default)]
    pub abduce_ineq: bool,
    pub backend: Option<String>,
    #[serde(default, rename = "problem")]
    pub problems: Vec<ManifestProblem>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestProblem {
    /// Relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
}

fn default_timeout() -> f64 {
    35.0
}

fn default_size_limits() -> Vec<usize> {
    vec![1]
}

fn default_depth() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowResult {
    /// Seconds to the first implicate, `None` when no implicate came in time.
    Measured(Option<f64>),
    Error(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub size_limit: Option<usize>,
    pub result: RowResult,
}

impl BenchRow {
    pub fn bucket(&self) -> &'static str {
        match self.result {
            RowResult::Measured(Some(t)) => bucket_of(t),
            RowResult::Measured(None) => "none",
            RowResult::Error(_) => "error",
        }
    }
}

pub fn bucket_of(seconds: f64) -> &'static str {
    BUCKETS.iter().find(|(hi, _)| seconds < *hi).map_or("none", |(_, name)| name)
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid manifest {}", path.display()))
}

/// Runs every problem at every size limit, stopping each run at its first
/// implicate. Failures are recorded as rows and do not stop the run.
pub fn bench(manifest_path: &Path, backend: Option<&Backend>, out: &mut dyn Write) -> Result<Vec<BenchRow>> {
    let manifest = load_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let budget = Duration::from_secs_f64(manifest.timeout);
    let query_timeout = Some(budget.min(Duration::from_secs(5)));
    let backend = match (backend, &manifest.backend) {
        (Some(b), _) => b.clone(),
        (None, Some(cmd)) => Backend::parse(cmd, query_timeout),
        (None, None) => Backend::parse("z3", query_timeout),
    };
    let source = AbducibleSource::Generate {
        options: GenerateOptions { depth: manifest.abduce_depth, inequalities: manifest.abduce_ineq },
        seeds: Vec::new(),
        declared_constants: true,
    };

    writeln!(out, "problem\tsize_limit\ttime_to_first\tbucket\tnote")?;
    let mut rows = Vec::new();
    for entry in &manifest.problems {
        let path = base.join(&entry.path);
        let name = entry.path.display().to_string();
        let mut prepared = match prepare(&path, None, &source, &backend) {
            Ok(p) => p,
            Err(e) => {
                let row = BenchRow { problem: name, size_limit: None, result: RowResult::Error(format!("{e:#}")) };
                write_row(out, &row)?;
                rows.push(row);
                continue;
            }
        };
        for &k in &manifest.size_limits {
            let config = EngineConfig {
                predicate: ResultPredicate::SizeLimit(k),
                time_limit: Some(budget),
                max_implicates: Some(1),
                ..EngineConfig::imp()
            };
            let result = match search(
                prepared.main.as_mut(),
                prepared.bare.as_mut(),
                &prepared.abducibles,
                &config,
                None,
            ) {
                Ok(o) => RowResult::Measured(
                    o.stats.time_to_first.map(|d| d.as_secs_f64()).filter(|&t| t < manifest.timeout),
                ),
                Err(e) => RowResult::Error(e.to_string()),
            };
            let row = BenchRow { problem: name.clone(), size_limit: Some(k), result };
            write_row(out, &row)?;
            rows.push(row);
        }
    }

    writeln!(out)?;
    write!(out, "size_limit")?;
    for (_, name) in BUCKETS {
        write!(out, "\t{name}")?;
    }
    writeln!(out, "\tnone")?;
    for &k in &manifest.size_limits {
        write!(out, "{k}")?;
        let at_k: Vec<&BenchRow> = rows.iter().filter(|r| r.size_limit == Some(k)).collect();
        for name in BUCKETS.iter().map(|(_, n)| *n).chain(["none"]) {
            write!(out, "\t{}", at_k.iter().filter(|r| r.bucket() == name).count())?;
        }
        writeln!(out)?;
    }
    Ok(rows)
}

fn write_row(out: &mut dyn Write, row: &BenchRow) -> Result<()> {
    let size = row.size_limit.map_or("-".to_string(), |k| k.to_string());
    let (time, note) = match &row.result {
        RowResult::Measured(Some(t)) => (format!("{t:.3}"), String::new()),
        RowResult::Measured(None) => ("-".to_string(), String::new()),
        RowResult::Error(e) => ("-".to_string(), e.replace(['\t', '\n'], " ")),
    };
    writeln!(out, "{}\t{size}\t{time}\t{}\t{note}", row.problem, row.bucket())?;
    Ok(())
}
