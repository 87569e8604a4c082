//! Flat key/value reports, rendered as text, JSON or CSV.
//!
//! Values are rounded to the printed precision before they reach any
//! format, so all three agree digit for digit.

use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::format::number;

/// Values whose magnitude falls below these floors print as 0 (or `inf`
/// for condition numbers); they are rounding noise, not information.
pub const RELATIVE_ZERO: f64 = 1e-12;
pub const CONDITION_CEILING: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Nums(Vec<f64>),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Field {
    fn text(&self) -> String {
        match self {
            Field::Num(v) => number(*v),
            Field::Nums(v) => v.iter().map(|&x| number(x)).collect::<Vec<_>>().join(", "),
            Field::Int(v) => v.to_string(),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Field::Nums(v) => v.iter().map(|&x| number(x)).collect::<Vec<_>>().join(";"),
            other => other.text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(v) => json_number(*v),
            Field::Nums(v) => Value::Array(v.iter().map(|&x| json_number(x)).collect()),
            Field::Int(v) => Value::from(*v),
            Field::Text(s) => Value::String(s.clone()),
            Field::Bool(b) => Value::Bool(*b),
        }
    }
}

/// The printed value as a JSON number; non-finite values become strings.
fn json_number(x: f64) -> Value {
    let s = number(x);
    match s.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(s),
    }
}

/// `x`, or 0 when `|x| ≤ RELATIVE_ZERO·scale`.
pub fn floor_relative(x: f64, scale: f64) -> f64 {
    if x.abs() <= RELATIVE_ZERO * scale { 0.0 } else { x }
}

pub fn floor_condition(c: f64) -> f64 {
    if c > CONDITION_CEILING { f64::INFINITY } else { c }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    fields: Vec<(String, Field)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: Field) -> &mut Self {
        self.fields.push((key.into(), value));
        self
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.push(key, Field::Num(v))
    }

    pub fn nums(&mut self, key: &str, v: &[f64]) -> &mut Self {
        self.push(key, Field::Nums(v.to_vec()))
    }

    pub fn int(&mut self, key: &str, v: i64) -> &mut Self {
        self.push(key, Field::Int(v))
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.push(key, Field::Text(v.into()))
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.push(key, Field::Bool(v))
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Text => {
                let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.fields {
                    writeln!(out, "{k:<width$}  {}", v.text())?;
                }
            }
            Format::Json => {
                let mut map = Map::new();
                for (k, v) in &self.fields {
                    map.insert(k.clone(), v.json());
                }
                writeln!(out, "{}", serde_json::to_string_pretty(&Value::Object(map))?)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(self.fields.iter().map(|(k, _)| k.as_str())).map_err(io::Error::other)?;
                w.write_record(self.fields.iter().map(|(_, v)| v.csv())).map_err(io::Error::other)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Column table for the sweep; text and CSV share the CSV layout.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn render(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Text | Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.header).map_err(io::Error::other)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(|&x| number(x))).map_err(io::Error::other)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let mut m = Map::new();
                        for (h, &x) in self.header.iter().zip(r) {
                            m.insert((*h).to_string(), json_number(x));
                        }
                        Value::Object(m)
                    })
                    .collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&Value::Array(rows))?)?;
            }
        }
        Ok(())
    }
}
