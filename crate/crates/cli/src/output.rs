// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scan results and their CSV/JSON serialisations.
//!
//! CSV layout: `#`-prefixed metadata lines, then the main table, then each
//! extra section introduced by a `# section: <name>` line. Floats use 17
//! significant digits so values parse back bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn text(s: impl ToString) -> Self {
        Self::Text(s.to_string())
    }

    pub fn flag(b: bool) -> Self {
        Self::Int(b as i64)
    }

    fn csv(&self) -> String {
        match self {
            Self::Num(x) => format_float(*x),
            Self::Int(i) => i.to_string(),
            Self::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no NaN/inf; keep them as strings
            Self::Num(x) if !x.is_finite() => Value::String(format_float(*x)),
            Self::Num(x) => json!(x),
            Self::Int(i) => json!(i),
            Self::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn write_csv(&self, out: &mut String) {
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    }

    fn json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub table: Table,
    /// Named extra tables, in output order.
    pub sections: Vec<(String, Table)>,
    /// Number of rows or points that carry a failure marker.
    pub failures: usize,
    pub metadata: Map<String, Value>,
}

impl ScanResult {
    pub fn new(table: Table) -> Self {
        Self {
            table,
            sections: Vec::new(),
            failures: 0,
            metadata: Map::new(),
        }
    }

    pub fn section(&self, name: &str) -> Option<&Table> {
        self.sections.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.data_csv());
        out
    }

    /// Everything after the metadata block; identical across runs.
    pub fn data_csv(&self) -> String {
        let mut out = String::new();
        self.table.write_csv(&mut out);
        for (name, t) in &self.sections {
            let _ = writeln!(out, "# section: {name}");
            t.write_csv(&mut out);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut obj = self.table.json();
        let sections: Map<String, Value> = self.sections.iter().map(|(n, t)| (n.clone(), t.json())).collect();
        obj["metadata"] = Value::Object(self.metadata.clone());
        if !sections.is_empty() {
            obj["sections"] = Value::Object(sections);
        }
        obj
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
        }
    }
}

pub fn write_output(result: &ScanResult, format: Format, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, result.render(format)).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A table read back from CSV; every cell kept as text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[k].parse().ok()).collect()
    }
}

/// Reads the main table (key `""`) and named sections from CSV text.
pub fn parse_csv(text: &str) -> Vec<(String, ParsedTable)> {
    let mut out: Vec<(String, ParsedTable)> = Vec::new();
    let mut current: Option<(String, ParsedTable)> = Some((String::new(), ParsedTable::default()));
    let mut header_pending = true;
    for line in text.lines() {
        if let Some(name) = line.strip_prefix("# section: ") {
            out.extend(current.take());
            current = Some((name.to_string(), ParsedTable::default()));
            header_pending = true;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        let t = &mut current.as_mut().expect("table").1;
        if header_pending {
            t.columns = cells;
            header_pending = false;
        } else {
            t.rows.push(cells);
        }
    }
    out.extend(current);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScanResult {
        let mut t = Table::new(&["x", "y", "phase"]);
        t.push(vec![Cell::Num(0.1), Cell::Num(1.0 / 3.0), Cell::text("unbroken")]);
        t.push(vec![Cell::Num(-2.5e-300), Cell::Num(f64::NAN), Cell::text("broken")]);
        let mut r = ScanResult::new(t);
        let mut c = Table::new(&["gamma", "M1", "M2", "gap", "cond_V"]);
        c.push(vec![0.5.into(), 0.25.into(), (-0.125).into(), 1e-7.into(), 1e5.into()]);
        r.sections.push(("contours".into(), c));
        r.metadata.insert("tool".into(), json!("sqbath"));
        r
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-200, -7.0e300, 5e-324, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert!(format_float(f64::NAN).parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let parsed = parse_csv(&r.to_csv());
        assert_eq!(parsed.len(), 2);
        let (name, main) = &parsed[0];
        assert_eq!(name, "");
        assert_eq!(main.columns, vec!["x", "y", "phase"]);
        let x = main.column("x").unwrap();
        assert_eq!(x[0].to_bits(), 0.1f64.to_bits());
        assert_eq!(x[1].to_bits(), (-2.5e-300f64).to_bits());
        assert_eq!(parsed[1].0, "contours");
        assert_eq!(parsed[1].1.column("M2").unwrap(), vec![-0.125]);
    }

    #[test]
    fn empty_rows_keep_header() {
        let mut r = ScanResult::new(Table::new(&["a", "b"]));
        r.metadata.insert("k".into(), json!(1));
        assert_eq!(r.to_csv(), "# k: 1\na,b\n");
    }

    #[test]
    fn json_shape() {
        let v = sample().to_json();
        assert_eq!(v["columns"][1], "y");
        assert_eq!(v["rows"][1][1], "NaN");
        assert_eq!(v["sections"]["contours"]["columns"][4], "cond_V");
        assert_eq!(v["metadata"]["tool"], "sqbath");
    }
}
