//! CSV ingestion for chaos kernels `(w, v, f(w,v))` and forward-variance
//! curves `(u, ξ₀(u))`.
//!
//! Both readers accept an optional header row and `#` comment lines.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::affine::ForwardVarianceCurve;
use crate::error::{Error, Result};
use crate::models::chaos::Chaos2Kernel;

fn numeric_rows(reader: impl Read, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != width {
            return Err(Error::Parse(format!(
                "line {line}: expected {width} columns, found {}",
                rec.len()
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.iter().all(|x| x.is_finite()) => rows.push(v),
            Ok(_) => return Err(Error::Parse(format!("line {line}: non-finite value"))),
            // A first record with no numeric field is a header.
            Err(_) if i == 0 && rec.iter().all(|f| f.parse::<f64>().is_err()) => {}
            Err(e) => return Err(Error::Parse(format!("line {line}: {e}"))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(rows)
}

/// Reads a kernel sampled at the left grid points of a uniform grid.
///
/// The grid is inferred from the distinct `w` and `v` coordinates, which must
/// be multiples `k·h` of one step; `horizon` defaults to `cells·h`. Missing
/// simplex entries are zero.
pub fn read_chaos_kernel(reader: impl Read, horizon: Option<f64>) -> Result<Chaos2Kernel> {
    let rows = numeric_rows(reader, 3)?;
    let mut coords: Vec<f64> = rows.iter().flat_map(|r| [r[0], r[1]]).collect();
    coords.sort_by(f64::total_cmp);
    coords.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    if coords.len() < 2 || coords[0].abs() > 1e-12 {
        return Err(Error::Parse(
            "kernel grid must start at 0 and have at least two points".into(),
        ));
    }
    let h = coords[1] - coords[0];
    let index = |x: f64| -> Result<usize> {
        let k = (x / h).round();
        if (x - k * h).abs() > 1e-9 * h.max(x.abs()) {
            return Err(Error::Parse(format!("coordinate {x} is off the uniform grid of step {h}")));
        }
        Ok(k as usize)
    };
    let cells = index(*coords.last().expect("non-empty"))? + 1;
    let horizon = horizon.unwrap_or(cells as f64 * h);
    if (horizon / cells as f64 - h).abs() > 1e-9 * h {
        return Err(Error::GridMismatch(format!(
            "{cells} cells of step {h} do not span [0, {horizon}]"
        )));
    }
    let mut m = DMatrix::zeros(cells, cells);
    for r in &rows {
        let (i, j) = (index(r[0])?, index(r[1])?);
        if i < j {
            m[(i, j)] = r[2];
        }
    }
    Chaos2Kernel::from_matrix(horizon, m)
}

pub fn read_chaos_kernel_file(path: &Path, horizon: Option<f64>) -> Result<Chaos2Kernel> {
    read_chaos_kernel(std::fs::File::open(path)?, horizon)
}

/// Writes a kernel as `w,v,f` rows over the strict simplex.
pub fn write_chaos_kernel(kernel: &Chaos2Kernel, out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["w", "v", "f"])?;
    let h = kernel.step();
    let m = kernel.matrix();
    for j in 1..kernel.cells() {
        for i in 0..j {
            w.write_record([
                (i as f64 * h).to_string(),
                (j as f64 * h).to_string(),
                m[(i, j)].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads `(u, ξ₀(u))` rows; sorted by `u`, duplicate times rejected.
pub fn read_forward_curve(reader: impl Read) -> Result<ForwardVarianceCurve> {
    let mut rows = numeric_rows(reader, 2)?;
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let (times, values) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
    ForwardVarianceCurve::sampled(times, values)
}

pub fn read_forward_curve_file(path: &Path) -> Result<ForwardVarianceCurve> {
    read_forward_curve(std::fs::File::open(path)?)
}
