//! Plot-ready CSV artifacts. Numbers carry 17 significant digits, so every
//! `f64` reads back bit-exactly; exact zeros are written as `0`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CellField, Grid1D};
use crate::run::{DiagnosticsSeries, Snapshot};

use super::sweep::{ConvergenceRow, ConvergenceTable};

pub const SNAPSHOT_HEADER: &str = "x,q,w";
pub const TABLE_HEADER: &str = "eta,l1_q,l1_w,linf_max,entropy_min";
pub const DIAGNOSTICS_HEADER: &str = "time,mass,l1,linf,tv";

/// Shortest decimal rendering with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let digits = (16 - exp).max(0) as usize;
        trim_fraction(format!("{:.*}", digits, v))
    } else {
        format!("{}e{}", trim_fraction(mantissa.to_string()), exp)
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn snapshot_to_string(snapshot: &Snapshot) -> String {
    let grid = snapshot.q.grid();
    let mut out = String::with_capacity(grid.n_cells() * 48);
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    let w = snapshot.w.as_ref().map(|w| w.right_face_cells());
    for (i, (x, q)) in grid.centers().zip(snapshot.q.values()).enumerate() {
        let w = w
            .as_ref()
            .map_or(String::new(), |w| format_f64(w.values()[i]));
        let _ = writeln!(out, "{},{},{}", format_f64(x), format_f64(*q), w);
    }
    out
}

/// Rows `x,q,w`: cell center, cell value, operator value at the cell's right
/// face (empty for local runs).
pub fn write_snapshot_csv(snapshot: &Snapshot, path: &Path) -> Result<()> {
    write_text(path, &snapshot_to_string(snapshot))
}

pub fn table_to_string(table: &ConvergenceTable) -> String {
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_f64(r.eta),
            format_f64(r.l1_q),
            format_f64(r.l1_w),
            format_f64(r.linf_max),
            format_f64(r.entropy_min)
        );
    }
    out
}

pub fn write_table_csv(table: &ConvergenceTable, path: &Path) -> Result<()> {
    write_text(path, &table_to_string(table))
}

pub fn write_diagnostics_csv(series: &DiagnosticsSeries, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in &series.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_f64(r.time),
            format_f64(r.mass),
            format_f64(r.l1),
            format_f64(r.linf),
            format_f64(r.tv)
        );
    }
    write_text(path, &out)
}

/// Columns of a snapshot CSV as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotData {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub w: Option<Vec<f64>>,
}

impl SnapshotData {
    /// Rebuilds the uniform grid from the cell centers.
    pub fn grid(&self) -> Result<Grid1D> {
        let n = self.x.len();
        if n < 2 {
            return Err(Error::Validation(
                "snapshot needs at least two cells".into(),
            ));
        }
        let dx = (self.x[n - 1] - self.x[0]) / (n - 1) as f64;
        Grid1D::new(self.x[0] - 0.5 * dx, self.x[n - 1] + 0.5 * dx, n)
    }

    pub fn cell_field(&self) -> Result<CellField> {
        CellField::new(self.grid()?, self.q.clone())
    }
}

fn parse_number(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("not a number: {s:?}"),
    })
}

pub fn parse_snapshot_csv(text: &str, path: &Path) -> Result<SnapshotData> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SNAPSHOT_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: format!("expected header {SNAPSHOT_HEADER:?}"),
            })
        }
    }
    let mut data = SnapshotData {
        x: Vec::new(),
        q: Vec::new(),
        w: Some(Vec::new()),
    };
    let mut has_w = None;
    for (idx, line) in lines {
        let ln = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: ln,
                message: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        data.x.push(parse_number(path, ln, cols[0])?);
        data.q.push(parse_number(path, ln, cols[1])?);
        let w_present = !cols[2].trim().is_empty();
        if *has_w.get_or_insert(w_present) != w_present {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: ln,
                message: "w column must be filled on every row or on none".into(),
            });
        }
        if w_present {
            data.w
                .as_mut()
                .unwrap()
                .push(parse_number(path, ln, cols[2])?);
        }
    }
    if has_w != Some(true) {
        data.w = None;
    }
    Ok(data)
}

pub fn read_snapshot_csv(path: &Path) -> Result<SnapshotData> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot_csv(&text, path)
}

pub fn parse_table_csv(text: &str, path: &Path) -> Result<ConvergenceTable> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .split(',')
            .map(|c| parse_number(path, idx + 1, c))
            .collect::<Result<Vec<f64>>>()?;
        if v.len() != 5 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("expected 5 columns, found {}", v.len()),
            });
        }
        rows.push(ConvergenceRow {
            eta: v[0],
            l1_q: v[1],
            l1_w: v[2],
            linf_max: v[3],
            entropy_min: v[4],
        });
    }
    Ok(ConvergenceTable { rows })
}
