//! Flat tabular records written as CSV or as a JSON array of objects.
//!
//! Floating-point values are printed with 17 significant digits so that
//! parsing the text back yields the identical `f64`.

use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    Null,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(x.into())
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Str(x.to_owned())
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Num)
    }
}

/// Ordered `(column, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_owned(), value.into()));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Num(x) => format_f64(*x),
        Value::Int(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::Str(s) => s.clone(),
        Value::Null => String::new(),
    }
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Num(x) => format_f64(*x),
        Value::Int(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => serde_json::Value::String(s.clone()).to_string(),
        Value::Null => "null".to_owned(),
    }
}

pub fn write_csv<W: Write>(out: &mut W, records: &[Record]) -> io::Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header: Vec<&str> = first.0.iter().map(|(k, _)| k.as_str()).collect();
    writeln!(out, "{}", header.join(","))?;
    for rec in records {
        let row: Vec<String> = rec.0.iter().map(|(_, v)| csv_cell(v)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_json<W: Write>(out: &mut W, records: &[Record]) -> io::Result<()> {
    writeln!(out, "[")?;
    for (i, rec) in records.iter().enumerate() {
        let fields: Vec<String> = rec
            .0
            .iter()
            .map(|(k, v)| {
                format!(
                    "{}: {}",
                    serde_json::Value::String(k.clone()),
                    json_value(v)
                )
            })
            .collect();
        let sep = if i + 1 < records.len() { "," } else { "" };
        writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
    }
    writeln!(out, "]")
}

pub fn write_records<W: Write>(out: &mut W, format: Format, records: &[Record]) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(out, records),
        Format::Json => write_json(out, records),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Vec<Record> {
        vec![
            Record::new()
                .with("eta_ref", 0.1)
                .with("fidelity", Some(0.98))
                .with("status", "ok"),
            Record::new()
                .with("eta_ref", 0.0)
                .with("fidelity", None)
                .with("status", "degenerate"),
        ]
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "eta_ref,fidelity,status\n\
             1.0000000000000001e-1,9.7999999999999998e-1,ok\n\
             0.0000000000000000e0,,degenerate\n"
        );
    }

    #[test]
    fn json_is_an_array_of_flat_objects() {
        let mut buf = Vec::new();
        write_json(&mut buf, &sample()).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let rows = parsed.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["fidelity"].as_f64(), Some(0.98));
        assert!(rows[1]["fidelity"].is_null());
        assert_eq!(rows[1]["status"], "degenerate");
    }

    #[test]
    fn csv_quotes_awkward_strings() {
        assert_eq!(csv_cell(&Value::from("a,b")), "\"a,b\"");
    }

    proptest! {
        #[test]
        fn decimal_round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let text = format_f64(x);
            prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());

            let mut buf = Vec::new();
            write_json(&mut buf, &[Record::new().with("x", x)]).unwrap();
            let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
            prop_assert_eq!(parsed[0]["x"].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }
}
