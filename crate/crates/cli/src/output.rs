//! Report emission: versioned JSON documents and RFC-4180 CSV tables.

use std::io::Write;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::config::{CommonArgs, Format};
use crate::error::CliError;

pub const SCHEMA: u64 = 1;

/// A report under construction: a header object plus a table of rows.
pub struct Report {
    header: Map<String, Value>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    started: Instant,
}

impl Report {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        let mut header = Map::new();
        header.insert("schema".into(), json!(SCHEMA));
        header.insert("command".into(), json!(command));
        Self {
            header,
            columns,
            rows: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.header.insert(key.into(), value);
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn emit(mut self, common: &CommonArgs) -> Result<(), CliError> {
        if !common.no_timing {
            self.header.insert("seconds".into(), json!(self.started.elapsed().as_secs_f64()));
        }
        let mut sink: Box<dyn Write> = match &common.out {
            Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
            None => Box::new(std::io::stdout().lock()),
        };
        match common.format() {
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                    .collect();
                self.header.insert("rows".into(), Value::Array(rows));
                serde_json::to_writer_pretty(&mut sink, &Value::Object(self.header)).map_err(std::io::Error::other)?;
                writeln!(sink)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut sink);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell))?;
                }
                w.flush()?;
            }
        }
        sink.flush()?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => format!("{f:.16e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// A float as JSON, with non-finite values mapped to `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}
