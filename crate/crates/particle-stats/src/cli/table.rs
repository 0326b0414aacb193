//! Tabular output shared by every subcommand: CSV with a header row and
//! round-trip-exact floats, or JSON with the stable schema described in
//! docs/output-schema.json.

use serde_json::{json, Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Null,
}

impl Cell {
    pub(crate) fn text(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

/// 17 significant digits: enough that reading the decimal back recovers the
/// identical double.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub(crate) struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub(crate) fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub(crate) fn of(columns: &[&str]) -> Self {
        Table::new(columns.iter().map(|c| c.to_string()).collect())
    }

    #[cfg(test)]
    pub(crate) fn columns(&self) -> &[String] {
        &self.columns
    }

    #[cfg(test)]
    pub(crate) fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub(crate) fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub(crate) fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_f64(*x),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(s) => {
                        debug_assert!(!s.contains(',') && !s.contains('"'));
                        s.clone()
                    }
                    Cell::Null => String::new(),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub(crate) fn to_json(&self, command: &str) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(x) => Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
                        Cell::Int(n) => Value::Number((*n).into()),
                        Cell::Text(s) => Value::String(s.clone()),
                        Cell::Null => Value::Null,
                    };
                    obj.insert((*name).to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "command": command,
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub(crate) fn render(&self, format: Format, command: &str) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(command))
                    .expect("tables serialize");
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub(crate) enum Format {
    Csv,
    Json,
}
