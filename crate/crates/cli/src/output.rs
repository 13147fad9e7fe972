//! The output record and its JSON/CSV encodings.

use std::io::Write;
use std::str::FromStr;

use drg_core::qseries::to_f64;
use drg_core::Rational;
use serde::Serialize;
use serde_json::{json, Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub payload: Value,
}

/// Rows for `--format csv`; one row per atom for measures.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a command produced, plus the exit code it asks for.
pub struct Report {
    pub payload: Value,
    pub table: Table,
    pub exit: u8,
}

impl Report {
    pub fn ok(payload: Value, table: Table) -> Self {
        Self { payload, table, exit: 0 }
    }
}

fn big(s: String) -> Value {
    // arbitrary_precision keeps every digit of the integer
    Value::Number(Number::from_str(&s).expect("integer literal"))
}

/// `{"num": .., "den": .., "float": ..}` with exact integers.
pub fn rational(r: &Rational) -> Value {
    json!({ "num": big(r.numer().to_string()), "den": big(r.denom().to_string()), "float": float(to_f64(r)) })
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

/// Finite floats as numbers, anything else as `null`.
pub fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| float(x)).collect())
}

/// Shortest round-trip text; scientific outside `[1e-4, 1e15)`.
pub fn cell(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn write_json(
    out: &mut impl Write,
    command: &str,
    inputs: Map<String, Value>,
    payload: Value,
) -> std::io::Result<()> {
    let rec = OutputRecord {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        inputs: Value::Object(inputs),
        payload,
    };
    serde_json::to_writer_pretty(&mut *out, &rec)?;
    writeln!(out)
}

pub fn write_csv(out: &mut impl Write, table: &Table) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use drg_core::qseries::rat;

    #[test]
    fn rational_encoding() {
        let v = rational(&rat(-3, 8));
        assert_eq!(v["num"], json!(-3));
        assert_eq!(v["den"], json!(8));
        assert_eq!(v["float"], json!(-0.375));
        let huge = Rational::from_integer(num_traits::pow(drg_core::qseries::int(10).numer().clone(), 30));
        assert_eq!(serde_json::to_string(&rational(&huge)["num"]).unwrap(), format!("1{}", "0".repeat(30)));
    }

    #[test]
    fn non_finite_floats_are_null() {
        assert_eq!(float(f64::NAN), Value::Null);
        assert_eq!(floats(&[1.0, f64::INFINITY]), json!([1.0, null]));
    }

    #[test]
    fn cells() {
        assert_eq!(cell(2.0), "2");
        assert_eq!(cell(-0.375), "-0.375");
        assert_eq!(cell(1.5e-20), "1.5e-20");
    }
}
