use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};

/// One CSV cell.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Formats a double with 17 significant digits, trimming trailing zeros.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new leading digit; the value is still exact to 17 digits.
        trim(&s)
    } else {
        let s = format!("{x:.16e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", trim(mant))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_sig17(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) => Number::from_f64(*x).map(Value::Number).unwrap_or_else(|| Value::String(fmt_sig17(*x))),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// A table with a fixed header, written as CSV or, for `.json` outputs, as
/// an array of records.
#[derive(Debug)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: Option<&Path>) -> io::Result<()> {
        match out {
            None => self.write_csv(io::stdout().lock()),
            Some(path) if path.extension().is_some_and(|e| e == "json") => {
                let mut f = File::create(path)?;
                serde_json::to_writer_pretty(&mut f, &self.json())?;
                writeln!(f)
            }
            Some(path) => self.write_csv(File::create(path)?),
        }
    }

    fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(Cell::csv))?;
        }
        wr.flush()
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_sig17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(fmt_sig17(0.0), "0");
        assert_eq!(fmt_sig17(1.0), "1");
        assert_eq!(fmt_sig17(-0.25), "-0.25");
        assert_eq!(fmt_sig17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_sig17(1.5e20), "1.5e20");
        for x in [0.1, 1.0 / 3.0, 123456.789, 6.02e23, 1e-300, -2.5e-6] {
            assert_eq!(fmt_sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
