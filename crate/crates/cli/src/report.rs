//! The JSON report and its flat CSV view.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub results: Vec<Value>,
    pub summary: Value,
    /// False when any quadrature stopped before reaching its tolerance.
    pub converged: bool,
    /// Outcome of the property checks, for commands that make any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

/// Exit status: 0 success, 1 input error, 2 non-convergence, 3 failed check.
pub fn exit_code(report: &Report) -> i32 {
    if !report.converged {
        2
    } else if report.passed == Some(false) {
        3
    } else {
        0
    }
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Input(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    /// One row per result; nested objects become dotted columns and
    /// complex pairs `.re`/`.im` columns.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<(String, String)>> = self
            .results
            .iter()
            .map(|r| {
                let mut cells = Vec::new();
                flatten("", r, &mut cells);
                cells
            })
            .collect();
        let mut columns: Vec<String> = Vec::new();
        for row in &rows {
            for (k, _) in row {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&columns)?;
        for row in &rows {
            let record: Vec<&str> = columns
                .iter()
                .map(|c| row.iter().find(|(k, _)| k == c).map_or("", |(_, v)| v.as_str()))
                .collect();
            w.write_record(record)?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => flatten_object(prefix, map, out),
        Value::Array(items) if items.len() == 2 && items.iter().all(Value::is_number) => {
            out.push((join(prefix, "re"), items[0].to_string()));
            out.push((join(prefix, "im"), items[1].to_string()));
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), joined.join(";")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(prefix, &i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn flatten_object(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        flatten(&join(prefix, k), v, out);
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
