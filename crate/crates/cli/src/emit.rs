use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

/// Significant digits kept for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Structured JSON with sorted keys
    #[default]
    Json,
    /// Comma-separated header line and rows
    Rows,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn round_float(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn fmt_float(x: f64) -> String {
    let r = round_float(x);
    if r != 0.0 && r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else if r == r.trunc() && r.is_finite() {
        format!("{r:.1}")
    } else {
        format!("{r}")
    }
}

/// Rounds every float to [`SIGNIFICANT_DIGITS`]; non-finite values become
/// strings since JSON has no literal for them.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            Number::from_f64(round_float(x)).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

pub fn render_json(report: Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&canonical(report)).expect("values serialize");
    out.push(b'\n');
    out
}

pub fn render_rows(table: &Table) -> Vec<u8> {
    let mut out = table.header.join(",");
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}
