//! JSON and CSV rendering of command results.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A command result: a table plus optional `key,value` footer rows for CSV.
pub struct Output {
    /// Full result, emitted as JSON.
    pub json: Value,
    /// Rows for CSV; a single object becomes a one-row table.
    pub table: Value,
    pub footer: Vec<(String, Value)>,
}

impl Output {
    pub fn record(value: Value) -> Self {
        Output {
            table: value.clone(),
            json: value,
            footer: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("JSON values serialise");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
        }
    }

    fn csv(&self) -> String {
        let rows: Vec<Map<String, Value>> = match &self.table {
            Value::Array(items) => items.iter().map(flatten).collect(),
            other => vec![flatten(other)],
        };
        let mut out = String::new();
        if let Some(first) = rows.first() {
            let header: Vec<&str> = first.keys().map(String::as_str).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in &rows {
                let cells: Vec<String> = header
                    .iter()
                    .map(|k| row.get(*k).map_or_else(String::new, cell))
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        for (key, value) in &self.footer {
            out.push_str(&format!("{key},{}\n", cell(value)));
        }
        out
    }
}

/// Nested objects become dotted column names.
fn flatten(value: &Value) -> Map<String, Value> {
    let mut out = Map::new();
    match value {
        Value::Object(map) => flatten_into("", map, &mut out),
        other => {
            out.insert("value".into(), other.clone());
        }
    }
    out
}

fn flatten_into(prefix: &str, map: &Map<String, Value>, out: &mut Map<String, Value>) {
    for (k, v) in map {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Object(inner) => flatten_into(&key, inner, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

/// Floats get 17 significant digits so values round-trip exactly.
pub fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(cell).collect();
            format!("\"{}\"", inner.join(";"))
        }
        Value::Object(_) => serde_json::to_string(value).unwrap_or_default(),
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_single_record() {
        let out = Output::record(json!({"value": 0.5, "k_terms": 3, "nested": {"a": true}}));
        assert_eq!(
            out.render(Format::Csv),
            "value,k_terms,nested.a\n5.0000000000000000e-1,3,true\n"
        );
    }

    #[test]
    fn csv_table_with_footer() {
        let out = Output {
            json: Value::Null,
            table: json!([{"x": 1.0}, {"x": 2.0}]),
            footer: vec![("limit".into(), json!(3.0))],
        };
        assert_eq!(
            out.render(Format::Csv),
            "x\n1.0000000000000000e0\n2.0000000000000000e0\nlimit,3.0000000000000000e0\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            4.0 / std::f64::consts::PI,
            1e-300,
            123456.789,
        ] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn quoting() {
        assert_eq!(cell(&json!("a,b")), "\"a,b\"");
        assert_eq!(cell(&json!(null)), "");
    }
}
