//! CSV tables, JSON reports, SVG files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
    All,
}

/// Which artifacts to write. Without `--format` the run writes CSV and JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Formats {
    pub fn from_flag(f: Option<Format>) -> Self {
        match f {
            None => Self {
                csv: true,
                json: true,
                svg: false,
            },
            Some(Format::Csv) => Self {
                csv: true,
                json: false,
                svg: false,
            },
            Some(Format::Json) => Self {
                csv: false,
                json: true,
                svg: false,
            },
            Some(Format::Svg) => Self {
                csv: false,
                json: false,
                svg: true,
            },
            Some(Format::All) => Self {
                csv: true,
                json: true,
                svg: true,
            },
        }
    }
}

/// A cell is either a number or a label.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // Shortest round-trip representation; deterministic across runs.
            Cell::Num(v) if *v == 0.0 || (1e-4..1e15).contains(&v.abs()) => format!("{v}"),
            Cell::Num(v) => format!("{v:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Rectangular table with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(())
    }
}

/// Artifact sink for one run: writes files under the output directory and
/// records each path for the manifest.
pub struct Sink {
    pub dir: PathBuf,
    pub command: String,
    pub formats: Formats,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, command: &str, formats: Formats) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            formats,
            written: Vec::new(),
        })
    }

    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let stem = if suffix.is_empty() {
            self.command.clone()
        } else {
            format!("{}_{suffix}", self.command)
        };
        self.dir.join(format!("{stem}.{ext}"))
    }

    /// Writes `<command>[_suffix].csv` when CSV output is on.
    pub fn csv(&mut self, suffix: &str, table: &Table) -> Result<()> {
        if self.formats.csv {
            let p = self.path(suffix, "csv");
            table.write_csv(&p)?;
            self.written.push(p);
        }
        Ok(())
    }

    pub fn json(&mut self, report: &Value) -> Result<()> {
        if self.formats.json {
            let p = self.path("", "json");
            write_text(&p, &serde_json::to_string_pretty(report)?)?;
            self.written.push(p);
        }
        Ok(())
    }

    pub fn svg(&mut self, suffix: &str, doc: &str) -> Result<()> {
        if self.formats.svg {
            let p = self.path(suffix, "svg");
            write_text(&p, doc)?;
            self.written.push(p);
        }
        Ok(())
    }

    /// Writes the manifest listing every artifact of the run.
    pub fn finish(mut self, params: Value, seed: u64) -> Result<PathBuf> {
        let p = self.path("manifest", "json");
        self.written.push(p.clone());
        let m = RunManifest {
            command: self.command.clone(),
            params,
            outputs: self
                .written
                .iter()
                .map(|q| q.display().to_string())
                .collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            seed,
        };
        write_text(&p, &serde_json::to_string_pretty(&m)?)?;
        Ok(p)
    }
}

/// Provenance record for a run; lists every file written, itself included.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub outputs: Vec<String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub seed: u64,
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_through_csv_text() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e12, 0.0] {
            let s = Cell::Num(v).render();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(Cell::Empty.render(), "");
    }

    #[test]
    fn default_formats_skip_svg() {
        let f = Formats::from_flag(None);
        assert!(f.csv && f.json && !f.svg);
        let f = Formats::from_flag(Some(Format::All));
        assert!(f.csv && f.json && f.svg);
    }
}
