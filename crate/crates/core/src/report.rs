//! Report emission: stable JSON, CSV profiles and plain-text tables.
//!
//! JSON keys are sorted and every non-integer number is printed with 17
//! significant digits, so identical results give byte-identical output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::deform::RankProfile;
use crate::error::Result;

/// Fixed float format: 17 significant digits, exponent notation.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&fmt_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[k.as_str()], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Stable JSON text of a value, with a trailing newline.
pub fn to_stable_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// CSV with header `t,rank,sigma_k`, one row per evaluated grid point.
pub fn profile_csv<W: Write>(profile: &RankProfile, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["t", "rank", "sigma_k"]).map_err(csv_err)?;
    for p in &profile.points {
        wtr.write_record([fmt_float(p.t), p.rank.to_string(), fmt_float(p.sigma_k)])
            .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_profile_csv(profile: &RankProfile, path: &Path) -> Result<()> {
    profile_csv(profile, std::fs::File::create(path)?)
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => crate::error::Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Two-column table of label/value rows.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}
