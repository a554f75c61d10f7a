//! Table assembly and the three output encodings (aligned text, CSV, JSON).
//! Formatting is deterministic for a fixed configuration: rationals print
//! as `p/q`, floats at the configured number of significant digits.

use blspec::exact::{fmt_rat, fmt_sig, Rat};
use std::io::Write;

#[derive(Debug, Clone)]
pub enum Cell {
    U(u64),
    F(f64),
    R(Rat),
    S(String),
    B(bool),
}

impl Cell {
    fn render(&self, digits: usize) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::F(v) => fmt_sig(*v, digits),
            Cell::R(v) => fmt_rat(v),
            Cell::S(v) => v.clone(),
            Cell::B(v) => v.to_string(),
        }
    }

    fn to_json(&self, digits: usize) -> serde_json::Value {
        match self {
            Cell::U(v) => serde_json::Value::from(*v),
            Cell::F(v) => {
                let rounded: f64 = fmt_sig(*v, digits).parse().unwrap_or(*v);
                serde_json::Number::from_f64(rounded)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null)
            }
            Cell::R(v) => serde_json::Value::from(fmt_rat(v)),
            Cell::S(v) => serde_json::Value::from(v.clone()),
            Cell::B(v) => serde_json::Value::from(*v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, header: Vec<&'static str>) -> Self {
        Self {
            name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, digits: usize, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(digits)))?;
        }
        w.flush()
    }

    pub fn write_json(&self, digits: usize, out: &mut dyn Write) -> std::io::Result<()> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.header.iter().zip(row) {
                    obj.insert(name.to_string(), cell.to_json(digits));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "command": self.name, "rows": rows });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
    }

    pub fn write_text(&self, digits: usize, out: &mut dyn Write) -> std::io::Result<()> {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.render(digits)).collect())
            .collect();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let head: Vec<String> = self
            .header
            .iter()
            .zip(&widths)
            .map(|(h, w)| format!("{h:<w$}"))
            .collect();
        writeln!(out, "{}", head.join("  "))?;
        for row in &rendered {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            writeln!(out, "{}", line.join("  "))?;
        }
        Ok(())
    }
}
