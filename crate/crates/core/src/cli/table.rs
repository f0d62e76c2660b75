//! Fixed-format CSV tables: `#` header lines, a column row, 12 significant digits.

use std::fmt::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    /// `None` renders as an empty cell.
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn format_number(v: f64) -> String {
    // -0 and 0 must print identically for byte-stable output
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            for line in c.lines() {
                let _ = write!(out, "# {line}\r\n");
            }
        }
        let header: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        let _ = write!(out, "{}\r\n", header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.map(format_number).unwrap_or_default()).collect();
            let _ = write!(out, "{}\r\n", cells.join(","));
        }
        out
    }

    /// Reads back what [`Table::to_csv`] writes.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
        for line in lines.by_ref() {
            if let Some(c) = line.strip_prefix('#') {
                table.comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                continue;
            }
            table.columns = split_fields(line);
            break;
        }
        if table.columns.is_empty() {
            return Err(Error::Config("CSV has no header row".into()));
        }
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let row = split_fields(line)
                .iter()
                .map(|f| {
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        f.parse::<f64>().map(Some).map_err(|_| Error::Config(format!("CSV row {}: bad number {f:?}", n + 1)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != table.columns.len() {
                return Err(Error::Config(format!("CSV row {} has {} fields, expected {}", n + 1, row.len(), table.columns.len())));
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}

fn split_fields(line: &str) -> Vec<String> {
    let mut fields = vec![];
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}
