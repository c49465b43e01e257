use std::collections::BTreeMap;
use std::fmt::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

/// A command's result: one table plus summary fields. Every value is a string.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn row<I: IntoIterator<Item = S>, S: ToString>(&mut self, values: I) {
        let row: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.insert(key.to_string(), value.to_string());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.tsv(),
            Format::Json => self.json(),
        }
    }

    fn tsv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.columns.join("\t")).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", r.join("\t")).unwrap();
        }
        for (k, v) in &self.summary {
            writeln!(out, "# {k}\t{v}").unwrap();
        }
        out
    }

    fn json(&self) -> String {
        let mut top = Map::new();
        top.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
        top.insert("command".into(), Value::String(self.command.clone()));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> =
                    self.columns.iter().cloned().zip(r.iter().map(|v| Value::String(v.clone()))).collect();
                Value::Object(m)
            })
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        let summary: Map<String, Value> =
            self.summary.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        top.insert("summary".into(), Value::Object(summary));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).unwrap();
        s.push('\n');
        s
    }
}
