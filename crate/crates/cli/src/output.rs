//! Rendering of report rows as CSV or JSON behind a provenance header.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::{CliError, CliResult};

/// A finished report: provenance plus rows, each a flat JSON object.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub provenance: Value,
    pub rows: Vec<Value>,
}

impl Artifact {
    pub fn new(provenance: impl Serialize, rows: Vec<Value>) -> CliResult<Self> {
        Ok(Self {
            provenance: to_value(provenance)?,
            rows,
        })
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let doc = serde_json::json!({
                    "provenance": self.provenance,
                    "rows": self.rows,
                });
                let mut s = serde_json::to_string_pretty(&doc)
                    .map_err(|e| CliError::Invariant(format!("serializing output: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> CliResult<String> {
        let mut columns: Vec<String> = Vec::new();
        for row in &self.rows {
            if let Value::Object(m) = row {
                for k in m.keys() {
                    if !columns.contains(k) {
                        columns.push(k.clone());
                    }
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Invariant(format!("writing csv: {e}"));
        w.write_record(&columns).map_err(fail)?;
        for row in &self.rows {
            let cells: Vec<String> = columns.iter().map(|c| cell(row.get(c))).collect();
            w.write_record(&cells).map_err(fail)?;
        }
        let body = w
            .into_inner()
            .map_err(|e| CliError::Invariant(format!("writing csv: {e}")))?;
        let mut out = format!("# {}\n", self.provenance);
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> CliResult<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::io("<stdout>", e))
            }
        }
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

pub fn to_value(v: impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Invariant(format!("serializing a report: {e}")))
}
