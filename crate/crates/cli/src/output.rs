use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub struct Emitter<'a> {
    pub format: Format,
    pub timing: bool,
    pub config: &'a RunConfig,
    pub started: Instant,
}

impl Emitter<'_> {
    /// One JSON line, or a CSV table of the result.
    pub fn emit<T: Serialize>(&self, command: &str, result: &T) -> std::io::Result<()> {
        let result = serde_json::to_value(result).map_err(std::io::Error::other)?;
        let mut out = std::io::stdout().lock();
        match self.format {
            Format::Json => {
                let timing = self
                    .timing
                    .then(|| json!({"elapsed_ms": self.started.elapsed().as_secs_f64() * 1e3}));
                let record = json!({
                    "tool_version": TOOL_VERSION,
                    "command": command,
                    "config_echo": self.config,
                    "timing": timing,
                    "result": result,
                });
                writeln!(out, "{record}")
            }
            Format::Csv => write_csv(&mut out, &result),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Arrays of objects become tables with the union of their keys as header;
/// anything else becomes `key,value` rows (or a single `value` cell).
pub fn write_csv(out: &mut impl Write, v: &Value) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match v {
        Value::Array(rows) if rows.iter().all(Value::is_object) => {
            let mut header: Vec<String> = Vec::new();
            for row in rows {
                for k in row.as_object().unwrap().keys() {
                    if !header.contains(k) {
                        header.push(k.clone());
                    }
                }
            }
            w.write_record(&header)?;
            for row in rows {
                w.write_record(header.iter().map(|k| cell(row.get(k).unwrap_or(&Value::Null))))?;
            }
        }
        Value::Object(map) => {
            w.write_record(["key", "value"])?;
            for (k, x) in map {
                w.write_record([k.as_str(), &cell(x)])?;
            }
        }
        other => {
            w.write_record(["value"])?;
            w.write_record([cell(other)])?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(v: Value) -> String {
        let mut buf = Vec::new();
        write_csv(&mut buf, &v).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn tables_and_pairs() {
        assert_eq!(csv_of(json!([{"a": 1, "b": "x"}, {"a": 2, "c": [1, 2]}])), "a,b,c\n1,x,\n2,,\"[1,2]\"\n");
        assert_eq!(csv_of(json!({"p": 5, "ok": true})), "key,value\nok,true\np,5\n");
        assert_eq!(csv_of(json!(3)), "value\n3\n");
    }
}
