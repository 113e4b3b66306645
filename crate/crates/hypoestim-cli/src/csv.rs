//! Minimal CSV reading and writing at full f64 round-trip precision.
//!
//! All numeric output goes through [`fmt_f64`] (17 significant digits), so a
//! file written here and parsed back yields bit-identical floats. Headers are
//! mandatory in both directions.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{io_fail, Failure};

/// `{:.16e}`: 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` and then one comma-joined row per record.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_fail(path, "create", e))?;
    let mut w = BufWriter::new(file);
    let mut line = String::new();
    writeln!(w, "{header}").map_err(|e| io_fail(path, "write", e))?;
    for row in rows {
        line.clear();
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(*x));
        }
        writeln!(w, "{line}").map_err(|e| io_fail(path, "write", e))?;
    }
    w.flush().map_err(|e| io_fail(path, "write", e))
}

/// A parsed CSV: header field names plus an all-numeric row matrix.
#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Index of the named column (trimmed, case-insensitive), if present.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.eq_ignore_ascii_case(name))
    }
}

/// Reads a whole CSV file. Every data row must have exactly as many fields
/// as the header; blank lines are skipped; errors carry 1-based line numbers.
pub fn read_csv(path: &Path) -> Result<Table, Failure> {
    let file = File::open(path).map_err(|e| io_fail(path, "open", e))?;
    let reader = BufReader::new(file);
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| io_fail(path, "read", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some(cols) = &columns else {
            columns = Some(trimmed.split(',').map(|f| f.trim().to_string()).collect());
            continue;
        };
        let mut row = Vec::with_capacity(cols.len());
        for (col, field) in trimmed.split(',').enumerate() {
            let x: f64 = field.trim().parse().map_err(|_| {
                Failure::Format(format!(
                    "{}:{}: column {} is not a number: {:?}",
                    path.display(),
                    lineno,
                    col + 1,
                    field.trim()
                ))
            })?;
            row.push(x);
        }
        if row.len() != cols.len() {
            return Err(Failure::Format(format!(
                "{}:{}: expected {} fields, found {}",
                path.display(),
                lineno,
                cols.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    let Some(columns) = columns else {
        return Err(Failure::Format(format!("{}: empty file, header required", path.display())));
    };
    Ok(Table { columns, rows })
}
