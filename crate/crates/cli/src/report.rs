//! Output assembly: schema-tagged JSON or header-first CSV, with every number
//! rounded to 9 significant digits so repeated runs are byte-identical.

use serde_json::{Map, Value};

pub const SCHEMA: &str = "setrap/1";

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    let r = sig9(x);
    serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
                format!("{x}")
            } else {
                format!("{x:e}")
            }
        }
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// What a subcommand produces: a flat record or a table of rows.
pub enum Report {
    Record(Map<String, Value>),
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>>, meta: Map<String, Value> },
}

impl Report {
    pub fn record(fields: Vec<(&str, Value)>) -> Self {
        Report::Record(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn table(columns: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        Report::Table { columns, rows, meta: Map::new() }
    }

    pub fn with_meta(self, fields: Vec<(&str, Value)>) -> Self {
        match self {
            Report::Table { columns, rows, mut meta } => {
                meta.extend(fields.into_iter().map(|(k, v)| (k.to_string(), v)));
                Report::Table { columns, rows, meta }
            }
            r => r,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = Map::new();
        out.insert("schema".into(), Value::String(SCHEMA.into()));
        match self {
            Report::Record(m) => out.extend(m.clone()),
            Report::Table { columns, rows, meta } => {
                out.extend(meta.clone());
                let rows = rows
                    .iter()
                    .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                    .collect();
                out.insert("rows".into(), Value::Array(rows));
            }
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let (header, rows): (Vec<String>, Vec<Vec<Value>>) = match self {
            Report::Record(m) => {
                let mut flat = Vec::new();
                for (k, v) in m {
                    flatten(k, v, &mut flat);
                }
                let (h, r): (Vec<_>, Vec<_>) = flat.into_iter().unzip();
                (h, vec![r])
            }
            Report::Table { columns, rows, .. } => (columns.iter().map(|c| c.to_string()).collect(), rows.clone()),
        };
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.iter().map(csv_cell).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

/// Scalars keep their name, nested objects use dotted names and numeric
/// arrays are indexed; arrays of objects are JSON-only.
fn flatten(key: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&format!("{key}.{k}"), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                out.push((format!("{key}.{i}"), x.clone()));
            }
        }
        Value::Array(_) => {}
        _ => out.push((key.to_string(), v.clone())),
    }
}
