//! Result tables, CSV emission and the per-run metadata file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One CSV field. Reals are written with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) if v.is_finite() => write!(f, "{v:.16e}"),
            Cell::Real(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        // seeds use the full 64-bit range; keep them exact as text
        if v <= i64::MAX as u64 {
            Cell::Int(v as i64)
        } else {
            Cell::Text(v.to_string())
        }
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Builds a row of [`Cell`]s from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::record::Cell::from($v)),*] };
}

/// A named table written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    /// Real or integer value at `(row, column)`.
    pub fn number(&self, row: usize, column: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column_index(column)?)? {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn text(&self, row: usize, column: &str) -> Option<String> {
        Some(self.rows.get(row)?.get(self.column_index(column)?)?.to_string())
    }

    /// Rows whose text columns equal the given values.
    pub fn rows_where(&self, filters: &[(&str, &str)]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| {
                filters
                    .iter()
                    .all(|(c, v)| self.text(r, c).as_deref() == Some(*v))
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.into_inner().map_err(|e| ExpError::Io(e.into_error()))
    }
}

/// Everything a run produced, plus the provenance needed to redo it.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub started_at: String,
    pub finished_at: String,
    pub tables: Vec<Table>,
    /// Scalar results keyed by name, e.g. `w1.free-field.gradient-descent`.
    pub summary: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct RunInfo<'a> {
    experiment: &'a str,
    version: &'a str,
    core_version: &'a str,
    config_hash: &'a str,
    seed: u64,
    replications: usize,
    epsilon: f64,
    bins: usize,
    bin_smoothing: f64,
    started_at: &'a str,
    finished_at: &'a str,
}

#[derive(Serialize)]
struct Metadata<'a> {
    run: RunInfo<'a>,
    files: Vec<String>,
    summary: &'a BTreeMap<String, f64>,
    config: &'a ExperimentConfig,
}

impl ResultRecord {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.summary.get(key).copied()
    }

    /// Metadata file contents: run provenance, summary values and the
    /// complete effective configuration.
    pub fn metadata_toml(&self) -> String {
        let meta = Metadata {
            run: RunInfo {
                experiment: self.config.experiment.name(),
                version: VERSION,
                core_version: vqoc_core::VERSION,
                config_hash: &self.config_hash,
                seed: self.config.seed,
                replications: self.config.replications,
                epsilon: self.config.metrics.epsilon,
                bins: self.config.metrics.bins,
                bin_smoothing: vqoc_core::metrics::BIN_SMOOTHING,
                started_at: &self.started_at,
                finished_at: &self.finished_at,
            },
            files: self.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
            summary: &self.summary,
            config: &self.config,
        };
        toml::to_string(&meta).expect("metadata serializes")
    }

    /// Writes every table and `metadata.toml` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            fs::write(&path, t.to_csv()?)?;
            written.push(path);
        }
        let path = dir.join("metadata.toml");
        fs::write(&path, self.metadata_toml())?;
        written.push(path);
        Ok(written)
    }
}
