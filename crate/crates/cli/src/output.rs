//! Result documents: JSON with a format version, or versioned CSV tables.

use serde_json::{Map, Value};
use std::io::Write;
use superell::format;

pub const FORMAT_VERSION: u64 = 1;

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Output {
    pub json: Value,
    pub table: Table,
}

/// Replaces every non-integral JSON number by its exponent-form decimal string.
pub fn stringify_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(format::f64(n.as_f64().unwrap())),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_floats(v))).collect()),
        other => other,
    }
}

pub fn with_version(v: Value) -> Value {
    let mut m = match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    m.insert("format_version".into(), Value::from(FORMAT_VERSION));
    Value::Object(m)
}

pub fn render_json(out: &Output) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(&with_version(stringify_floats(out.json.clone()))).expect("serializable");
    s.push(b'\n');
    s
}

pub fn render_csv(out: &Output) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "# format_version: {FORMAT_VERSION}").unwrap();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&out.table.columns).unwrap();
        for r in &out.table.rows {
            w.write_record(r).unwrap();
        }
        w.flush().unwrap();
    }
    buf
}

pub fn f(x: f64) -> String {
    format::f64(x)
}
