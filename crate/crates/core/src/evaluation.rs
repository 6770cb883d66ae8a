//! Grid evaluation of trained models, error statistics against a reference
//! field, and CSV / PGM serialization.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::networks::NetworkModel;
use crate::oracle::{grid_coord, GridField};

/// Rows with `y` above this are excluded from [`DiffStats::max_abs_below_y95`].
pub const GATE_Y_MAX: f64 = 0.95;

/// Summary of an absolute-difference field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Largest difference over nodes with `y <= 0.95`, away from the
    /// discontinuity at the top corners.
    pub max_abs_below_y95: f64,
    /// Node `(i, j)` attaining `max_abs`; ties go to the smallest `(j, i)`.
    pub argmax: (usize, usize),
}

impl DiffStats {
    /// `max_abs=… mean_abs=… max_abs_below_y95=…`
    pub fn summary_line(&self) -> String {
        format!(
            "max_abs={} mean_abs={} max_abs_below_y95={}",
            self.max_abs, self.mean_abs, self.max_abs_below_y95
        )
    }
}

/// Intensity mapping for [`write_heatmap`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HeatmapRange {
    Fixed { lo: f64, hi: f64 },
    /// The field's own minimum and maximum.
    Auto,
}

/// Scalar forward pass of `model` at every node of the `n × n` grid.
pub fn eval_grid(model: &NetworkModel, n: usize) -> Result<GridField> {
    GridField::from_fn(n, |x, y| model.eval(x, y))
}

pub fn abs_diff(a: &GridField, b: &GridField) -> Result<(GridField, DiffStats)> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let n = a.n();
    let diff: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(u, v)| (u - v).abs())
        .collect();

    let mut max_abs = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    let mut below: f64 = 0.0;
    let mut sum = 0.0;
    for j in 0..n {
        let gated = grid_coord(j, n) <= GATE_Y_MAX + 1e-12;
        for i in 0..n {
            let d = diff[j * n + i];
            sum += d;
            if d > max_abs {
                max_abs = d;
                argmax = (i, j);
            }
            if gated {
                below = below.max(d);
            }
        }
    }
    let stats = DiffStats {
        max_abs,
        mean_abs: sum / diff.len() as f64,
        max_abs_below_y95: below,
        argmax,
    };
    Ok((GridField::new(n, diff)?, stats))
}

/// Writes `x,y,u` rows, `y` outer and `x` inner, with 8 decimals.
pub fn write_csv(field: &GridField, mut out: impl Write) -> Result<()> {
    let n = field.n();
    writeln!(out, "x,y,u")?;
    for j in 0..n {
        let y = field.coord(j);
        for i in 0..n {
            writeln!(out, "{:.8},{:.8},{:.8}", field.coord(i), y, field.get(i, j))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_csv(field: &GridField, path: impl AsRef<Path>) -> Result<()> {
    write_csv(field, BufWriter::new(File::create(path)?))
}

/// Parses the format produced by [`write_csv`]. Nodes must appear in grid
/// order and the node count must be a square of at least 4.
pub fn read_csv(input: impl BufRead) -> Result<GridField> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some("x,y,u") {
        return Err(parse_error(1, "expected header `x,y,u`"));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_error(line_no, format!("expected 3 fields, found {}", fields.len())));
        }
        let mut row = [0.0; 3];
        for (slot, text) in row.iter_mut().zip(&fields) {
            *slot = text
                .trim()
                .parse::<f64>()
                .map_err(|e| parse_error(line_no, format!("`{}`: {e}", text.trim())))?;
            if !slot.is_finite() {
                return Err(parse_error(line_no, "non-finite number"));
            }
        }
        rows.push((line_no, row));
    }

    let count = rows.len();
    let n = (count as f64).sqrt().round() as usize;
    if n < 2 || n * n != count {
        return Err(parse_error(
            rows.last().map_or(1, |r| r.0),
            format!("{count} nodes do not form a square grid of side at least 2"),
        ));
    }
    let mut values = Vec::with_capacity(count);
    for (idx, (line_no, [x, y, u])) in rows.into_iter().enumerate() {
        let (i, j) = (idx % n, idx / n);
        if (x - grid_coord(i, n)).abs() > 1e-6 || (y - grid_coord(j, n)).abs() > 1e-6 {
            return Err(parse_error(
                line_no,
                format!("node ({x}, {y}) is not grid node ({i}, {j}) of a {n}x{n} grid"),
            ));
        }
        values.push(u);
    }
    GridField::new(n, values)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<GridField> {
    read_csv(BufReader::new(File::open(path)?))
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Plain PGM (`P2`) with maxval 255; the first image row is the `y = 1` grid row.
pub fn write_heatmap(field: &GridField, mut out: impl Write, range: HeatmapRange) -> Result<()> {
    let (lo, hi) = match range {
        HeatmapRange::Fixed { lo, hi } => {
            if !(lo < hi) {
                return Err(Error::Config(format!("heatmap range needs lo < hi, got [{lo}, {hi}]")));
            }
            (lo, hi)
        }
        HeatmapRange::Auto => field
            .values()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    };
    let n = field.n();
    writeln!(out, "P2\n{n} {n}\n255")?;
    let mut line = String::new();
    for j in (0..n).rev() {
        line.clear();
        for i in 0..n {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&pixel(field.get(i, j), lo, hi).to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_heatmap(field: &GridField, path: impl AsRef<Path>, range: HeatmapRange) -> Result<()> {
    write_heatmap(field, BufWriter::new(File::create(path)?), range)
}

/// Gray level of `v` on `[lo, hi]`. A degenerate auto range maps to 0.
pub fn pixel(v: f64, lo: f64, hi: f64) -> u8 {
    if !(hi > lo) {
        return 0;
    }
    (255.0 * ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).round() as u8
}
