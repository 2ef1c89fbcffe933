//! Tabular reports: rendered as aligned text and as records.

use std::fmt::Write as _;

use crate::io::{Literal, Record};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A rate in [0, 1], shown as a percentage.
    Rate(f64),
    /// A rate with the half-width of its confidence interval.
    RateCi(f64, f64),
    /// Mean and standard deviation of per-unit rates.
    MeanStd(f64, f64),
    Count(usize),
    Text(String),
    Empty,
}

impl Cell {
    /// Value compared against floors; rates in percent.
    pub fn primary(&self) -> Option<f64> {
        match self {
            Cell::Rate(r) | Cell::RateCi(r, _) | Cell::MeanStd(r, _) => Some(r * 100.0),
            Cell::Count(n) => Some(*n as f64),
            Cell::Text(_) | Cell::Empty => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Rate(r) => format!("{:.1}", r * 100.0),
            Cell::RateCi(r, h) | Cell::MeanStd(r, h) => format!("{:.1} ± {:.1}", r * 100.0, h * 100.0),
            Cell::Count(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => "-".into(),
        }
    }

    fn literal(&self) -> Option<Literal> {
        let pair = |a: &str, x: f64, b: &str, y: f64| {
            Literal::Map(vec![(a.into(), Literal::Float(x)), (b.into(), Literal::Float(y))])
        };
        match self {
            Cell::Rate(r) => Some(Literal::Float(*r)),
            Cell::RateCi(r, h) => Some(pair("rate", *r, "ci90", *h)),
            Cell::MeanStd(m, s) => Some(pair("mean", *m, "stddev", *s)),
            Cell::Count(n) => Some(Literal::Int(*n as i64)),
            Cell::Text(s) => Some(Literal::Str(s.clone())),
            Cell::Empty => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub title: String,
    /// Published table the report corresponds to, if any.
    pub target: Option<String>,
    /// Configuration echo, in insertion order.
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

impl MetricReport {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        MetricReport {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn target(mut self, t: impl Into<String>) -> Self {
        self.target = Some(t.into());
        self
    }

    pub fn config(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.config.push((key.into(), value.to_string()));
        self
    }

    pub fn row(&mut self, label: impl Into<String>, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(ReportRow { label: label.into(), cells });
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.iter().find(|r| r.label == row).and_then(|r| r.cells.get(c))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        if let Some(t) = &self.target {
            let _ = writeln!(out, "target: {t}");
        }
        for (k, v) in &self.config {
            let _ = writeln!(out, "{k}: {v}");
        }
        out.push('\n');
        let rendered: Vec<Vec<String>> = self.rows.iter().map(|r| r.cells.iter().map(Cell::render).collect()).collect();
        let label_w = self.rows.iter().map(|r| r.label.chars().count()).chain([0]).max().unwrap();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| rendered.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap())
            .collect();
        let _ = write!(out, "{:label_w$}", "");
        for (c, w) in self.columns.iter().zip(&widths) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&rendered) {
            let _ = write!(out, "{:label_w$}", row.label);
            for (c, w) in cells.iter().zip(&widths) {
                let _ = write!(out, "  {c:>w$}");
            }
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    /// A header record followed by one record per row.
    pub fn records(&self) -> Vec<Record> {
        let mut head = Record::new("@report").with("title", Literal::Str(self.title.clone()));
        if let Some(t) = &self.target {
            head = head.with("target", Literal::Str(t.clone()));
        }
        head = head.with(
            "config",
            Literal::Map(self.config.iter().map(|(k, v)| (k.clone(), Literal::Str(v.clone()))).collect()),
        );
        if !self.notes.is_empty() {
            head = head.with("notes", Literal::List(self.notes.iter().map(|n| Literal::Str(n.clone())).collect()));
        }
        let mut out = vec![head];
        for row in &self.rows {
            let mut r = Record::new(row.label.clone());
            for (col, cell) in self.columns.iter().zip(&row.cells) {
                if let Some(l) = cell.literal() {
                    r = r.with(col.clone(), l);
                }
            }
            out.push(r);
        }
        out
    }
}

/// Minimum acceptable value of one report cell, in percent for rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Floor {
    pub row: String,
    pub column: String,
    pub min: f64,
}

/// Parses `ROW:COLUMN=MIN`.
pub fn parse_floor(s: &str) -> Result<Floor, String> {
    let (cell, min) = s.rsplit_once('=').ok_or_else(|| format!("floor {s:?}: expected ROW:COLUMN=MIN"))?;
    let (row, column) = cell.rsplit_once(':').ok_or_else(|| format!("floor {s:?}: expected ROW:COLUMN=MIN"))?;
    let min: f64 = min.trim().parse().map_err(|_| format!("floor {s:?}: {min:?} is not a number"))?;
    Ok(Floor { row: row.into(), column: column.into(), min })
}

/// Messages for every floor the report misses. A floor naming a cell
/// the report lacks counts as missed.
pub fn check_floors(report: &MetricReport, floors: &[Floor]) -> Vec<String> {
    floors
        .iter()
        .filter_map(|f| match report.cell(&f.row, &f.column).and_then(Cell::primary) {
            Some(v) if v >= f.min => None,
            Some(v) => Some(format!("{}:{} = {v:.1} is below the floor {}", f.row, f.column, f.min)),
            None => Some(format!("{}:{} is not in the report", f.row, f.column)),
        })
        .collect()
}
