use std::fmt::Write as _;
use std::io::{self, Write};

use clap::ValueEnum;
use qubitswap::format::fmt_num;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    /// Value not defined for this row (outside the domain, infeasible).
    Missing,
}

impl Cell {
    fn plain(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Num(_) | Cell::Missing => "null".to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
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

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.csv(),
            OutputFormat::Json => self.json(),
            OutputFormat::Table => self.pretty(),
        }
    }

    pub fn write_to(&self, format: OutputFormat, mut w: impl Write) -> io::Result<()> {
        w.write_all(self.render(format).as_bytes())
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::plain).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(
                    out,
                    "{}: {}",
                    serde_json::to_string(col).expect("string serializes"),
                    cell.json()
                );
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out
    }

    fn pretty(&self) -> String {
        let text: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| if *c == Cell::Missing { "-".into() } else { c.plain() })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| text.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &mut dyn Iterator<Item = &str>| {
            let padded: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&mut self.columns.iter().map(String::as_str));
        out.push_str(&line(
            &mut widths
                .iter()
                .map(|w| &"------------------------------------------"[..(*w).min(42)]),
        ));
        for r in &text {
            out.push_str(&line(&mut r.iter().map(String::as_str)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["z", "x", "y"]);
        t.push(vec![0.5.into(), 1.0.into(), Some(0.1).into()]);
        t.push(vec![1.0.into(), 3.0.into(), Cell::Missing]);
        t
    }

    #[test]
    fn csv_uses_dot_decimals_and_empty_missing() {
        assert_eq!(
            sample().render(OutputFormat::Csv),
            "z,x,y\n0.5,1,0.10000000000000001\n1,3,\n"
        );
    }

    #[test]
    fn json_is_valid() {
        let text = sample().render(OutputFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[0]["y"], 0.1);
        assert!(v[1]["y"].is_null());
    }

    #[test]
    fn table_aligns_columns() {
        let text = sample().render(OutputFormat::Table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].ends_with('-'));
    }
}
