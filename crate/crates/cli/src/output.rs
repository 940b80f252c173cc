//! Tabular output shared by every command: exact `num/den` in CSV and JSON,
//! six-decimal rendering in the human table.

use std::io::Write;

use clap::ValueEnum;
use harmonic_broadcast::Ratio;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(u64),
    Num(Ratio),
    Text(String),
    Missing,
}

impl Cell {
    fn machine(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(r) => r.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Missing => "n/a".to_string(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(r) => r.to_decimal_string(6),
            other => other.machine(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(r) => serde_json::to_value(r).expect("ratio serialises"),
            Cell::Text(t) => json!(t),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<Ratio> for Cell {
    fn from(r: Ratio) -> Cell {
        Cell::Num(r)
    }
}

impl From<Option<Ratio>> for Cell {
    fn from(r: Option<Ratio>) -> Cell {
        r.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Cell {
        Cell::Int(v as u64)
    }
}

impl From<String> for Cell {
    fn from(t: String) -> Cell {
        Cell::Text(t)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Cell {
        Cell::Text(t.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Text(b.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Report {
        Report {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
            Format::Table => self.table(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::machine))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&rows).expect("serialisable");
        out.push('\n');
        out
    }

    fn table(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(Cell::human).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([c.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: Vec<&str>| -> String {
            let padded: Vec<String> = fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:<w$}"))
                .collect();
            let mut l = padded.join("  ");
            l.truncate(l.trim_end().len());
            l.push('\n');
            l
        };
        let mut out = line(self.columns.clone());
        out += &line(
            widths
                .iter()
                .map(|w| "-".repeat(*w))
                .collect::<Vec<_>>()
                .iter()
                .map(String::as_str)
                .collect(),
        );
        for row in &cells {
            out += &line(row.iter().map(String::as_str).collect());
        }
        out
    }
}

pub fn emit(text: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
