//! Tabular output in text, CSV or JSON.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render_short(&self) -> String {
        match self {
            Cell::Num(v) => format_float_short(*v),
            _ => self.render(),
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if !v.is_finite() {
        format!("{v}")
    } else if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else if v == v.trunc() {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// [`format_float`] after rounding to 12 significant digits.
pub fn format_float_short(v: f64) -> String {
    if !v.is_finite() {
        return format_float(v);
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    // Drops the sign of negative zero.
    format_float(if rounded == 0.0 { 0.0 } else { rounded })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    /// `name = value` pairs.
    Values {
        name: String,
        entries: Vec<(String, Cell)>,
    },
    Table {
        name: String,
        columns: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
}

impl Section {
    pub fn values(name: &str) -> Self {
        Section::Values { name: name.into(), entries: Vec::new() }
    }

    pub fn table(name: &str, columns: &[&str]) -> Self {
        Section::Table {
            name: name.into(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn table_owned(name: &str, columns: Vec<String>) -> Self {
        Section::Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        if let Section::Values { entries, .. } = self {
            entries.push((key.into(), value.into()));
        }
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        if let Section::Table { rows, columns, .. } = self {
            debug_assert_eq!(cells.len(), columns.len());
            rows.push(cells);
        }
        self
    }

    fn name(&self) -> &str {
        match self {
            Section::Values { name, .. } | Section::Table { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub sections: Vec<Section>,
    /// Sections too wide for text mode; CSV and JSON only.
    pub data_only: Vec<Section>,
    /// Free-text lines printed after the sections in text mode.
    pub notes: Vec<String>,
}

impl Report {
    pub fn push(&mut self, s: Section) -> &mut Self {
        self.sections.push(s);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("reports serialise");
                s.push('\n');
                s
            }
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "== {} ==", section.name());
            match section {
                Section::Values { entries, .. } => {
                    for (k, v) in entries {
                        let _ = writeln!(out, "{k} = {}", v.render_short());
                    }
                }
                Section::Table { columns, rows, .. } => {
                    let rendered: Vec<Vec<String>> =
                        rows.iter().map(|r| r.iter().map(Cell::render_short).collect()).collect();
                    let widths: Vec<usize> = (0..columns.len())
                        .map(|j| {
                            rendered
                                .iter()
                                .map(|r| r[j].chars().count())
                                .chain([columns[j].chars().count()])
                                .max()
                                .unwrap_or(0)
                        })
                        .collect();
                    let line = |cells: Vec<&str>| {
                        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ")
                    };
                    let _ = writeln!(out, "{}", line(columns.iter().map(String::as_str).collect()).trim_end());
                    for r in &rendered {
                        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()).trim_end());
                    }
                }
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "{note}");
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().chain(&self.data_only).enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {}", section.name());
            match section {
                Section::Values { entries, .. } => {
                    let _ = writeln!(out, "quantity,value");
                    for (k, v) in entries {
                        let _ = writeln!(out, "{},{}", csv_field(k), csv_field(&v.render()));
                    }
                }
                Section::Table { columns, rows, .. } => {
                    let header: Vec<String> = columns.iter().map(|c| csv_field(c)).collect();
                    let _ = writeln!(out, "{}", header.join(","));
                    for r in rows {
                        let cells: Vec<String> = r.iter().map(|c| csv_field(&c.render())).collect();
                        let _ = writeln!(out, "{}", cells.join(","));
                    }
                }
            }
        }
        out
    }

    fn json(&self) -> Value {
        let mut root = Map::new();
        for section in self.sections.iter().chain(&self.data_only) {
            let value = match section {
                Section::Values { entries, .. } => {
                    Value::Object(entries.iter().map(|(k, v)| (k.clone(), v.json())).collect())
                }
                Section::Table { columns, rows, .. } => Value::Array(
                    rows.iter()
                        .map(|r| Value::Object(columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                        .collect(),
                ),
            };
            root.insert(section.name().to_owned(), value);
        }
        Value::Object(root)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0625, 1.0, 1.0 / 3.0, -2.5e-17, 1e300] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(8.5e-19), "8.5e-19");
    }

    #[test]
    fn short_floats_hide_round_off() {
        assert_eq!(format_float_short(0.06250000000000004), "0.0625");
        assert_eq!(format_float_short(-1.0000000000000004), "-1.0");
        assert_eq!(format_float_short(-0.0), "0.0");
        assert_eq!(format_float_short(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float_short(2.5e-17), "2.5e-17");
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_field("(1,0,1,0)"), "\"(1,0,1,0)\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn text_values_use_equals() {
        let mut r = Report::default();
        let mut s = Section::values("outcomes");
        s.set("p(++)", 0.0625);
        r.push(s);
        assert!(r.render(Format::Text).contains("p(++) = 0.0625"));
    }
}
