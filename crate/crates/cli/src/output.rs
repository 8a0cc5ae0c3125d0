use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use heights::format::fmt_num;
use serde::Serialize;
use serde_json::{Map, Number, Value};

/// Destination of the emitted artifact: stdout or a file.
pub struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out })
    }

    pub fn line(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.out, "{s}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// A CSV table with a versioned schema comment on the first line.
pub struct Csv {
    kind: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(kind: &'static str, columns: &[&'static str]) -> Self {
        Self {
            kind,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn write(&self, sink: &mut Sink) -> io::Result<()> {
        sink.line(&schema_comment(self.kind))?;
        sink.line(&self.columns.join(","))?;
        for r in &self.rows {
            sink.line(&r.join(","))?;
        }
        Ok(())
    }
}

pub fn schema_id(kind: &str) -> String {
    format!("heights/{kind}/v1")
}

pub fn schema_comment(kind: &str) -> String {
    format!("# schema: {}", schema_id(kind))
}

/// Cell for an optional real: empty when absent.
pub fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Rounds every float in `v` to the printed precision.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("checked f64");
            let rounded: f64 = fmt_num(x).parse().unwrap_or(x);
            if let Some(r) = Number::from_f64(rounded) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// `value` as a JSON object carrying a `schema` field, floats at 12 significant digits.
pub fn to_json<T: Serialize>(kind: &str, value: &T) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let obj = match v {
        Value::Object(o) => o,
        other => {
            let mut o = Map::new();
            o.insert("value".into(), other);
            o
        }
    };
    let mut out = Map::new();
    out.insert("schema".into(), Value::String(schema_id(kind)));
    out.extend(obj);
    Ok(Value::Object(out))
}

pub fn write_json<T: Serialize>(sink: &mut Sink, kind: &str, value: &T) -> io::Result<()> {
    let v = to_json(kind, value).map_err(io::Error::other)?;
    let text = serde_json::to_string_pretty(&v).map_err(io::Error::other)?;
    sink.line(&text)
}
