use std::io::Write;

use serde_json::{Map, Value};

use crate::args::OutputFormat;

pub const SCHEMA: &str = "diamond-forests/1";

/// Result of one subcommand: a JSON payload plus an optional flat table for
/// CSV output.
#[derive(Debug, Clone)]
pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
    /// Overall verdict for `verify`; other commands always succeed.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(result: Value) -> Self {
        Report {
            result,
            table: None,
            passed: true,
        }
    }

    pub fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        });
        self
    }
}

/// Shortest round-trip decimal, as in the JSON output.
pub fn fmt_f64(v: f64) -> String {
    serde_json::Number::from_f64(v)
        .map(|n| n.to_string())
        .unwrap_or_else(|| v.to_string())
}

/// Rebuilds every object with keys in sorted order.
pub fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, sorted(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}

pub fn envelope(command: &str, config: Value, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    m.insert("config".into(), config);
    m.insert("result".into(), result);
    sorted(Value::Object(m))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(
    format: OutputFormat,
    doc: &Value,
    table: Option<&Table>,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, doc)?;
            writeln!(out)
        }
        OutputFormat::Csv => {
            let owned;
            let t = match table {
                Some(t) => t,
                None => {
                    let mut pairs = Vec::new();
                    flatten("", &doc["result"], &mut pairs);
                    owned = Table {
                        header: vec!["key".into(), "value".into()],
                        rows: pairs.into_iter().map(|(k, v)| vec![k, v]).collect(),
                    };
                    &owned
                }
            };
            let line = |r: &[String]| r.iter().map(|s| csv_field(s)).collect::<Vec<_>>().join(",");
            writeln!(out, "{}", line(&t.header))?;
            for r in &t.rows {
                writeln!(out, "{}", line(r))?;
            }
            Ok(())
        }
        OutputFormat::Text => {
            let mut pairs = Vec::new();
            flatten("", doc, &mut pairs);
            for (k, v) in pairs {
                writeln!(out, "{k} = {v}")?;
            }
            Ok(())
        }
    }
}
