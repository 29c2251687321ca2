//! Record writers. Every run starts with its resolved config; the
//! timestamp line is the only part that varies between identical runs.

use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

pub struct Writer<W: Write> {
    out: W,
    format: Format,
    columns: Option<Vec<String>>,
    records: usize,
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn csv_field(v: &Value) -> String {
    let raw = match v {
        Value::Null => return String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(x) => x.to_string(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

impl<W: Write> Writer<W> {
    pub fn begin(mut out: W, format: Format, config: &Value, header: bool, warnings: &[String]) -> io::Result<Self> {
        match format {
            Format::Json => {
                let mut head = Map::new();
                head.insert("config".into(), config.clone());
                if header {
                    head.insert("timestamp".into(), timestamp().into());
                }
                head.insert("warnings".into(), warnings.into());
                // reopen the object so records can be streamed
                let text = Value::Object(head).to_string();
                write!(out, "{},\"records\":[", &text[..text.len() - 1])?;
            }
            Format::Jsonl | Format::Csv => {
                writeln!(out, "# config: {config}")?;
                if header {
                    writeln!(out, "# timestamp: {}", timestamp())?;
                }
                for w in warnings {
                    writeln!(out, "# warning: {w}")?;
                }
            }
        }
        Ok(Writer {
            out,
            format,
            columns: None,
            records: 0,
        })
    }

    pub fn record(&mut self, value: impl Serialize) -> io::Result<()> {
        let v = serde_json::to_value(value).map_err(io::Error::other)?;
        match self.format {
            Format::Json => {
                if self.records > 0 {
                    self.out.write_all(b",")?;
                }
                write!(self.out, "{v}")?;
            }
            Format::Jsonl => writeln!(self.out, "{v}")?,
            Format::Csv => {
                let obj = match &v {
                    Value::Object(m) => m.clone(),
                    other => {
                        let mut m = Map::new();
                        m.insert("value".into(), other.clone());
                        m
                    }
                };
                if self.columns.is_none() {
                    let cols: Vec<String> = obj.keys().cloned().collect();
                    writeln!(self.out, "{}", cols.join(","))?;
                    self.columns = Some(cols);
                }
                let row: Vec<String> = self
                    .columns
                    .as_ref()
                    .expect("columns set")
                    .iter()
                    .map(|k| obj.get(k).map(csv_field).unwrap_or_default())
                    .collect();
                writeln!(self.out, "{}", row.join(","))?;
            }
        }
        self.records += 1;
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        if self.format == Format::Json {
            writeln!(self.out, "]}}")?;
        }
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn run(format: Format, records: &[Value]) -> String {
        let mut buf = Vec::new();
        let mut w = Writer::begin(&mut buf, format, &json!({"k": 1}), false, &["careful".into()]).unwrap();
        for r in records {
            w.record(r).unwrap();
        }
        w.finish().unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn json_document_parses() {
        let text = run(Format::Json, &[json!({"a": 1}), json!({"a": 2})]);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["records"].as_array().unwrap().len(), 2);
        assert_eq!(v["warnings"][0], "careful");
        assert!(v.get("timestamp").is_none());
        let empty: Value = serde_json::from_str(&run(Format::Json, &[])).unwrap();
        assert_eq!(empty["records"], json!([]));
    }

    #[test]
    fn csv_quotes_nested_values() {
        let text = run(Format::Csv, &[json!({"n": 2, "T": [[0, 0, 0]], "x": null})]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# config: {\"k\":1}");
        assert_eq!(lines[1], "# warning: careful");
        assert_eq!(lines[2], "n,T,x");
        assert_eq!(lines[3], "2,\"[[0,0,0]]\",");
    }
}
