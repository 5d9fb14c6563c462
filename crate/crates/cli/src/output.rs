//! Tabular output: CSV with 17 significant digits, or JSON.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `{:.16e}`: 17 significant digits, `.` as decimal separator.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Column-oriented JSON object.
    pub fn to_json_value(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            map.insert(
                name.clone(),
                Value::Array(self.rows.iter().map(|r| r[i].json()).collect()),
            );
        }
        Value::Object(map)
    }
}

/// Result of a command: a table plus structured metadata for JSON output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub meta: Value,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Report {
            table,
            meta: Value::Null,
        }
    }

    pub fn with_meta<T: Serialize>(mut self, meta: &T) -> Self {
        self.meta = serde_json::to_value(meta).unwrap_or(Value::Null);
        self
    }

    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        map.insert("columns".into(), Value::from(self.table.columns.clone()));
        map.insert("data".into(), self.table.to_json_value());
        if !self.meta.is_null() {
            map.insert("meta".into(), self.meta.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("json serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
        assert_eq!(format_float(f64::NAN), "nan");
        let s = format_float(std::f64::consts::PI);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1.0.into(), 2usize.into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "a,b,c\n1.0000000000000000e0,2,\"x,y\"\n");
    }
}
