//! Reports: a provenance header plus a table, rendered as JSON or CSV.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Nothing was checked.
    Ok,
    Pass,
    Fail,
}

impl Status {
    pub fn from_check(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok | Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

/// Rows of values under a fixed list of columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub status: Status,
    pub table: Table,
}

pub fn build_id() -> String {
    format!("{}+{}", env!("CARGO_PKG_VERSION"), env!("TENSORFREE_BUILD_ID"))
}

impl Report {
    pub fn to_json(&self, timestamp: bool) -> Value {
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.table.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = json!({
            "command": self.command,
            "build": build_id(),
            "config": self.config,
            "status": self.status,
            "columns": self.table.columns,
            "rows": rows,
        });
        if timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            out["timestamp"] = json!(secs);
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(cell))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format, timestamp: bool) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.to_json(timestamp))? + "\n"),
            Format::Csv => self.to_csv(),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
