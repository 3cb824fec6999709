use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::manifest::RunManifest;
use crate::CliError;

/// A finished command: report, optional CSV rows and exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub csv: Option<Table>,
    /// One-line summary for stderr.
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = f64>) {
        self.rows.push(row.into_iter().map(fmt_float).collect());
    }

    pub fn push_text(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Input(format!("csv: {e}")))
    }
}

/// Shortest round-trip representation, as in the JSON reports.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
    } else {
        x.to_string()
    }
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // serde_json's default map is a BTreeMap, so going through Value sorts keys
    let v = serde_json::to_value(value).map_err(|e| CliError::Input(format!("json: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Input(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Sidecar path: explicit `csv`, else the report path with a `.csv` extension.
pub fn csv_path(m: &RunManifest) -> Option<PathBuf> {
    m.csv
        .as_ref()
        .map(PathBuf::from)
        .or_else(|| m.out.as_ref().map(|o| Path::new(o).with_extension("csv")))
}

impl Outcome {
    pub fn write(&self, m: &RunManifest) -> Result<(), CliError> {
        let json = to_sorted_json(&self.report)?;
        match &m.out {
            Some(path) => write_file(Path::new(path), &json)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(json.as_bytes())
                    .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
            }
        }
        if let (Some(table), Some(path)) = (&self.csv, csv_path(m)) {
            write_file(&path, &table.to_csv()?)?;
        }
        Ok(())
    }
}
