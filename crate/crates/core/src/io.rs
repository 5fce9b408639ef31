//! CSV/JSON emission of trajectories and sweeps, plus the matching readers.
//!
//! Numbers are written in plain decimal notation with 12 significant
//! digits, independent of locale. JSON output is an array of row objects
//! keyed by the CSV column names.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex;
use serde_json::{Map, Value};

use crate::eigenmodes::Branch;
use crate::error::{Error, Result};
use crate::harness::{Simulation, SweepResult, SweepRow};
use crate::liouville::Diagnostics;
use crate::meanfield::{Record, TimeSeries};
use crate::num::Real;

pub const SERIES_COLUMNS: [&str; 7] = ["t", "re_a", "im_a", "re_b", "im_b", "w_a", "w_b"];
pub const DIAGNOSTIC_COLUMNS: [&str; 2] = ["trace_err", "trunc_tail"];
pub const SWEEP_COLUMNS: [&str; 8] = [
    "delta_l",
    "branch",
    "omega_f_used",
    "w_a_final",
    "w_b_final",
    "w_a_peak",
    "w_b_peak",
    "t_settle",
];

const SIGNIFICANT_DIGITS: i32 = 12;

/// Decimal rendering with 12 significant digits.
pub fn format_decimal(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // scientific form already has the rounding-adjusted exponent
    let sci = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
    let exponent: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (SIGNIFICANT_DIGITS - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_decimal(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => format_decimal(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    fn num(&self, column: &str) -> Result<f64> {
        match self {
            Cell::Num(x) => Ok(*x),
            Cell::Text(s) => Err(Error::Parse(format!("column `{column}`: expected number, got `{s}`"))),
        }
    }

    fn text(&self, column: &str) -> Result<&str> {
        match self {
            Cell::Text(s) => Ok(s),
            Cell::Num(x) => Err(Error::Parse(format!("column `{column}`: expected text, got {x}"))),
        }
    }
}

/// Something that renders as a header plus rows.
pub trait Table {
    fn columns(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<Cell>>;
}

fn series_cells<T: Real>(r: &Record<T>) -> Vec<Cell> {
    [r.t, r.a.re, r.a.im, r.b.re, r.b.im, r.w_a, r.w_b]
        .into_iter()
        .map(|x| Cell::Num(x.as_f64()))
        .collect()
}

impl<T: Real> Table for TimeSeries<T> {
    fn columns(&self) -> Vec<&'static str> {
        SERIES_COLUMNS.to_vec()
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.records.iter().map(series_cells).collect()
    }
}

impl<T: Real> Table for Simulation<T> {
    fn columns(&self) -> Vec<&'static str> {
        let mut cols = SERIES_COLUMNS.to_vec();
        if self.diagnostics.is_some() {
            cols.extend(DIAGNOSTIC_COLUMNS);
        }
        cols
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        match &self.diagnostics {
            None => self.series.rows(),
            Some(diag) => self
                .series
                .records
                .iter()
                .zip(diag)
                .map(|(r, d)| {
                    let mut cells = series_cells(r);
                    cells.push(Cell::Num(d.trace_err.as_f64()));
                    cells.push(Cell::Num(d.trunc_tail.as_f64()));
                    cells
                })
                .collect(),
        }
    }
}

impl<T: Real> Table for SweepResult<T> {
    fn columns(&self) -> Vec<&'static str> {
        SWEEP_COLUMNS.to_vec()
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.rows
            .iter()
            .map(|r| {
                let n = |x: T| Cell::Num(x.as_f64());
                vec![
                    n(r.delta_l),
                    Cell::Text(r.branch.to_string()),
                    n(r.omega_f_used),
                    n(r.w_a_final),
                    n(r.w_b_final),
                    n(r.w_a_peak),
                    n(r.w_b_peak),
                    n(r.t_settle),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}` (expected csv|json)"))),
        }
    }
}

pub fn render_csv(table: &impl Table) -> String {
    let mut out = table.columns().join(",");
    out.push('\n');
    for row in table.rows() {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn render_json(table: &impl Table) -> String {
    let columns = table.columns();
    let rows: Vec<Value> = table
        .rows()
        .iter()
        .map(|row| {
            let obj: Map<String, Value> =
                columns.iter().zip(row).map(|(c, cell)| (c.to_string(), cell.to_json())).collect();
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("json renders");
    s.push('\n');
    s
}

pub fn render(table: &impl Table, format: Format) -> String {
    match format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(table),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// Writes `text` to the destination.
pub fn write_text(text: &str, destination: &Destination) -> Result<()> {
    match destination {
        Destination::Stdout => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() })
        }
        Destination::File(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() }),
    }
}

/// Renders a table and writes it out.
pub fn emit(table: &impl Table, format: Format, destination: &Destination) -> Result<()> {
    write_text(&render(table, format), destination)
}

/// Header and typed cells of a rendered table.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ParsedTable {
    /// An empty JSON array carries no header; any column lookup then
    /// succeeds because there are no rows to index.
    fn column(&self, name: &str) -> Result<usize> {
        if self.columns.is_empty() && self.rows.is_empty() {
            return Ok(0);
        }
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
    }

    fn has(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }
}

pub fn parse_table(text: &str, format: Format) -> Result<ParsedTable> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Json => parse_json(text),
    }
}

fn parse_csv(text: &str) -> Result<ParsedTable> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row: Vec<Cell> = line
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>().map_or_else(|_| Cell::Text(s.to_string()), Cell::Num)
            })
            .collect();
        if row.len() != columns.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, header has {}",
                k + 1,
                row.len(),
                columns.len()
            )));
        }
        rows.push(row);
    }
    Ok(ParsedTable { columns, rows })
}

fn parse_json(text: &str) -> Result<ParsedTable> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = value.as_array().ok_or_else(|| Error::Parse("expected a JSON array".into()))?;
    let mut columns: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for item in items {
        let obj = item.as_object().ok_or_else(|| Error::Parse("expected row objects".into()))?;
        if columns.is_empty() {
            columns = obj.keys().cloned().collect();
        }
        let row = columns
            .iter()
            .map(|c| match obj.get(c) {
                Some(Value::Number(n)) => Ok(Cell::Num(n.as_f64().unwrap_or(f64::NAN))),
                Some(Value::Null) => Ok(Cell::Num(f64::NAN)),
                Some(Value::String(s)) => Ok(Cell::Text(s.clone())),
                Some(other) => Err(Error::Parse(format!("column `{c}`: unsupported value {other}"))),
                None => Err(Error::Parse(format!("row missing column `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(ParsedTable { columns, rows })
}

/// Reads a trajectory written by [`emit`]; diagnostics are picked up when
/// the oracle columns are present.
pub fn parse_simulation(text: &str, format: Format) -> Result<Simulation<f64>> {
    let table = parse_table(text, format)?;
    let idx: Vec<usize> = SERIES_COLUMNS.iter().map(|c| table.column(c)).collect::<Result<_>>()?;
    let diag_idx = if DIAGNOSTIC_COLUMNS.iter().all(|c| table.has(c)) {
        Some((table.column("trace_err")?, table.column("trunc_tail")?))
    } else {
        None
    };
    let mut records = Vec::with_capacity(table.rows.len());
    let mut diagnostics = Vec::new();
    for row in &table.rows {
        let v = |k: usize| row[idx[k]].num(SERIES_COLUMNS[k]);
        records.push(Record {
            t: v(0)?,
            a: Complex::new(v(1)?, v(2)?),
            b: Complex::new(v(3)?, v(4)?),
            w_a: v(5)?,
            w_b: v(6)?,
        });
        if let Some((te, tt)) = diag_idx {
            diagnostics.push(Diagnostics {
                trace_err: row[te].num("trace_err")?,
                trunc_tail: row[tt].num("trunc_tail")?,
            });
        }
    }
    Ok(Simulation { series: TimeSeries { records }, diagnostics: diag_idx.map(|_| diagnostics) })
}

/// Reads a sweep written by [`emit`].
pub fn parse_sweep(text: &str, format: Format) -> Result<SweepResult<f64>> {
    let table = parse_table(text, format)?;
    let idx: Vec<usize> = SWEEP_COLUMNS.iter().map(|c| table.column(c)).collect::<Result<_>>()?;
    let mut result = SweepResult::default();
    for row in &table.rows {
        let v = |k: usize| row[idx[k]].num(SWEEP_COLUMNS[k]);
        result.rows.push(SweepRow {
            delta_l: v(0)?,
            branch: row[idx[1]].text("branch")?.parse::<Branch>()?,
            omega_f_used: v(2)?,
            w_a_final: v(3)?,
            w_b_final: v(4)?,
            w_a_peak: v(5)?,
            w_b_peak: v(6)?,
            t_settle: v(7)?,
        });
    }
    Ok(result)
}
