//! Versioned result records and their JSON-lines / CSV encodings.
//!
//! Reals are written with 17 significant digits. The CSV layout is one row
//! per quantity with the frozen column order of [`CSV_COLUMNS`].

use crate::args::Format;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::{self, Write};

pub const SCHEMA: &str = "schottky.result/1";

pub const CSV_COLUMNS: [&str; 10] = [
    "schema", "group_hash", "command", "name", "value", "imag", "error", "tolerance", "passed",
    "wall_time_s",
];

/// One numeric output with its declared error estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imag: Option<f64>,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

impl Quantity {
    pub fn real(name: impl Into<String>, value: f64, error: f64) -> Self {
        Self {
            name: name.into(),
            value,
            imag: None,
            error,
            tolerance: None,
            passed: None,
        }
    }

    pub fn complex(name: impl Into<String>, z: num_complex::Complex64, error: f64) -> Self {
        Self {
            imag: Some(z.im),
            ..Self::real(name, z.re, error)
        }
    }

    /// Exact quantity (a count or an identifier).
    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self::real(name, value, 0.0)
    }

    /// A defect judged against a tolerance; NaN never passes.
    pub fn check(name: impl Into<String>, defect: f64, error: f64, tolerance: f64) -> Self {
        Self {
            tolerance: Some(tolerance),
            passed: Some(defect <= tolerance),
            ..Self::real(name, defect, error)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRecord {
    pub schema: &'static str,
    pub group_hash: String,
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: Vec<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_time_s: f64,
}

impl ResultRecord {
    pub fn new(group_hash: &str, command: &str) -> Self {
        Self {
            schema: SCHEMA,
            group_hash: group_hash.into(),
            command: command.into(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            note: None,
            wall_time_s: 0.0,
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs
            .insert(key.into(), serde_json::to_value(value).expect("input serialises"));
        self
    }

    pub fn push(&mut self, q: Quantity) {
        self.outputs.push(q);
    }

    pub fn failed(&self) -> bool {
        self.outputs.iter().any(|q| q.passed == Some(false))
    }

    pub fn to_json_line(&self) -> String {
        let v = serde_json::to_value(self).expect("record serialises");
        let mut out = String::new();
        write_value(&v, &mut out);
        out
    }
}

/// `x` with 17 significant digits; non-finite values become strings.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, Some(u), _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, _, Some(x)) => out.push_str(&format_f64(x)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serialises"));
                out.push(':');
                write_value(x, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// The single writer of records.
pub struct RecordSink<W: Write> {
    out: W,
    format: Format,
    header_written: bool,
}

impl<W: Write> RecordSink<W> {
    pub fn new(out: W, format: Format, header_written: bool) -> Self {
        Self {
            out,
            format,
            header_written,
        }
    }

    pub fn write(&mut self, r: &ResultRecord) -> io::Result<()> {
        match self.format {
            Format::Json => writeln!(self.out, "{}", r.to_json_line())?,
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut self.out);
                if !self.header_written {
                    w.write_record(CSV_COLUMNS)?;
                    self.header_written = true;
                }
                let opt = |x: Option<f64>| x.map(format_f64).unwrap_or_default();
                for q in &r.outputs {
                    w.write_record([
                        r.schema.to_string(),
                        r.group_hash.clone(),
                        r.command.clone(),
                        q.name.clone(),
                        format_f64(q.value),
                        opt(q.imag),
                        format_f64(q.error),
                        opt(q.tolerance),
                        q.passed.map(|p| p.to_string()).unwrap_or_default(),
                        format_f64(r.wall_time_s),
                    ])?;
                }
                w.flush()?;
            }
        }
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        let back: f64 = format_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_line_is_valid_json() {
        let mut r = ResultRecord::new("abc", "zeta-eval").input("lambda", 0.5).input("n", 3usize);
        r.push(Quantity::check("defect", 1e-12, 1e-15, 1e-9));
        r.push(Quantity::real("nan", f64::NAN, 0.0));
        let line = r.to_json_line();
        let v: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["inputs"]["n"], 3);
        assert_eq!(v["outputs"][0]["passed"], true);
        assert!(line.contains("\"lambda\":5.0000000000000000e-1"));
        assert!(!r.failed());
    }

    #[test]
    fn csv_has_frozen_header() {
        let mut buf = Vec::new();
        let mut sink = RecordSink::new(&mut buf, Format::Csv, false);
        let mut r = ResultRecord::new("h", "delta");
        r.push(Quantity::real("delta", 0.25, 1e-12));
        sink.write(&r).unwrap();
        sink.write(&r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("schottky.result/1,h,delta,delta,2.5000000000000000e-1,"));
    }
}
