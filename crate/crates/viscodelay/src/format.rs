//! Output encodings: JSON documents, `key = value` text records and CSV.
//!
//! JSON has no literal for non-finite numbers, so they are written as the
//! strings `"inf"`, `"-inf"` and `"nan"`. The same spellings appear in CSV
//! and text output, and Rust's float parser reads them back.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};
use viscodelay_core::analysis::{AuditResult, EnergyReport};
use viscodelay_core::dynamics::Trajectory;

use crate::{Error, Result};

/// `x` with 17 significant digits (enough to round-trip every `f64`).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn from_toml(v: toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s),
        toml::Value::Integer(i) => Value::Number(i.into()),
        toml::Value::Float(f) => Number::from_f64(f).map_or_else(|| Value::String(fmt_f64(f)), Value::Number),
        toml::Value::Boolean(b) => Value::Bool(b),
        toml::Value::Datetime(d) => Value::String(d.to_string()),
        toml::Value::Array(a) => Value::Array(a.into_iter().map(from_toml).collect()),
        toml::Value::Table(t) => Value::Object(t.into_iter().map(|(k, v)| (k, from_toml(v))).collect::<Map<_, _>>()),
    }
}

/// JSON tree of `x`, keeping non-finite floats as strings. `None` fields are
/// omitted and object keys come out sorted.
pub fn to_json<T: Serialize + ?Sized>(x: &T) -> Result<Value> {
    toml::Value::try_from(x)
        .map(from_toml)
        .map_err(|e| Error::Usage(format!("cannot encode report: {e}")))
}

/// Pretty JSON text with a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a JSON value always serialises");
    s.push('\n');
    s
}

/// One `key = value` line per leaf; nested keys are joined with `.` and
/// array elements are addressed by index.
pub fn text_records(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(a) if a.is_empty() => out.push_str(&format!("{prefix} = []\n")),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&join(&i.to_string()), x, out)),
            Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
            Value::Number(n) => {
                let text = n.as_f64().filter(|_| n.is_f64()).map_or_else(|| n.to_string(), fmt_f64);
                out.push_str(&format!("{prefix} = {text}\n"))
            }
            Value::Bool(b) => out.push_str(&format!("{prefix} = {b}\n")),
            Value::Null => out.push_str(&format!("{prefix} = null\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `x` as `<stem>.json` and `<stem>.txt` inside `dir`.
pub fn write_report<T: Serialize + ?Sized>(dir: &Path, stem: &str, x: &T) -> Result<Value> {
    let v = to_json(x)?;
    write_text(&dir.join(format!("{stem}.json")), &json_text(&v))?;
    write_text(&dir.join(format!("{stem}.txt")), &text_records(&v))?;
    Ok(v)
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

/// Writes a header and rows of numbers.
pub fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x))).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns `t, u_1 … u_n, v_1 … v_n`.
pub fn write_trajectory_csv(path: &Path, tr: &Trajectory) -> Result<()> {
    let n = tr.n_modes;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=n).map(|k| format!("u_{k}")))
        .chain((1..=n).map(|k| format!("v_{k}")))
        .collect();
    let rows = (0..tr.len()).map(|i| {
        let mut r = Vec::with_capacity(1 + 2 * n);
        r.push(tr.t[i]);
        r.extend_from_slice(tr.u_at(i));
        r.extend_from_slice(tr.v_at(i));
        r
    });
    write_csv(path, &header, rows)
}

pub const ENERGY_COLUMNS: [&str; 13] = [
    "t",
    "energy",
    "running_max",
    "kinetic",
    "elastic",
    "potential",
    "memory",
    "gain_window",
    "velocity_sq",
    "elastic_sq",
    "observed_window_max",
    "abs_gain",
    "gain_integral",
];

pub fn write_energy_csv(path: &Path, report: &EnergyReport) -> Result<()> {
    let header: Vec<String> = ENERGY_COLUMNS.iter().map(|s| s.to_string()).collect();
    let rows = report.samples.iter().map(|s| {
        let c = &s.components;
        vec![
            s.t,
            s.energy,
            s.running_max,
            c.kinetic,
            c.elastic,
            c.potential,
            c.memory,
            c.gain_window,
            s.velocity_sq,
            s.elastic_sq,
            s.observed_window_max,
            s.abs_gain,
            s.gain_integral,
        ]
    });
    write_csv(path, &header, rows)
}

/// One row per audit violation: `audit, t, lhs, rhs`.
pub fn write_violations_csv(path: &Path, audits: &[AuditResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["audit", "t", "lhs", "rhs"]).map_err(|e| csv_error(path, e))?;
    for a in audits {
        for v in &a.violations {
            w.write_record([a.kind.name().to_string(), fmt_f64(v.t), fmt_f64(v.lhs), fmt_f64(v.rhs)])
                .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads the named numeric columns of a CSV file with a header row.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h.trim() == *n)
                .ok_or_else(|| Error::parse(path, format!("missing column `{n}`")))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        for (c, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("").trim();
            let x = field
                .parse::<f64>()
                .map_err(|_| Error::parse(path, format!("row {}: `{field}` is not a number", line + 2)))?;
            cols[c].push(x);
        }
    }
    Ok(cols)
}
