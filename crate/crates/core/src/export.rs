//! Portable grid and distribution files.
//!
//! Grids are written as CSV (one row per line) or as a flat little-endian
//! binary: 8-byte magic, `u32` width, `u32` height, then `f64` values in
//! row-major order. Floats use Rust's shortest round-trip formatting.

use std::io::{BufRead, Read, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::lattice::Distribution;
use crate::optics::PoissonSample;

pub const GRID_MAGIC: [u8; 8] = *b"QTGRID01";
pub const GRID_HEADER_LEN: usize = 16;

pub fn write_grid_csv<W: Write>(grid: &Array2<f64>, mut w: W) -> Result<()> {
    for row in grid.outer_iter() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_grid_csv<R: BufRead>(r: R) -> Result<Array2<f64>> {
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut n = 0;
        let mut column = 1;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|e| Error::Parse {
                line: i + 1,
                column,
                message: format!("{field:?}: {e}"),
            })?;
            values.push(v);
            n += 1;
            column += field.chars().count() + 1;
        }
        match width {
            None => width = Some(n),
            Some(w) if w != n => {
                return Err(Error::Parse {
                    line: i + 1,
                    column: 1,
                    message: format!("row has {n} values, expected {w}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let width = width.ok_or_else(|| Error::Parse {
        line: 0,
        column: 0,
        message: "empty grid".into(),
    })?;
    Ok(Array2::from_shape_vec((rows, width), values).expect("shape matches value count"))
}

pub fn write_grid_binary<W: Write>(grid: &Array2<f64>, mut w: W) -> Result<()> {
    let (rows, cols) = grid.dim();
    let dim = |n: usize| u32::try_from(n).map_err(|_| Error::InvalidConfig(format!("grid extent {n} exceeds u32")));
    w.write_all(&GRID_MAGIC)?;
    w.write_all(&dim(cols)?.to_le_bytes())?;
    w.write_all(&dim(rows)?.to_le_bytes())?;
    for v in grid.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_binary<R: Read>(mut r: R) -> Result<Array2<f64>> {
    let mut header = [0u8; GRID_HEADER_LEN];
    r.read_exact(&mut header)?;
    if header[..8] != GRID_MAGIC {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: "bad grid magic".into(),
        });
    }
    let width = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
    let height = u32::from_le_bytes(header[12..16].try_into().expect("4 bytes")) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != width * height * 8 {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: format!("expected {} data bytes, found {}", width * height * 8, body.len()),
        });
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Array2::from_shape_vec((height, width), values).expect("shape matches value count"))
}

/// One row per mode: index (or `m_x,m_y`), probability, and with a sample
/// the raw count and its Poisson error.
pub fn write_distribution_csv<W: Write>(dist: &Distribution, sample: Option<&PoissonSample>, mut w: W) -> Result<()> {
    let l = dist.lattice();
    if let Some(s) = sample {
        if s.counts.len() != l.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: l.mode_count(),
                actual: s.counts.len(),
            });
        }
    }
    let index_cols = if l.dims() == 1 { "m" } else { "m_x,m_y" };
    match sample {
        Some(_) => writeln!(w, "{index_cols},probability,count,poisson_error")?,
        None => writeln!(w, "{index_cols},probability")?,
    }
    let errors = sample.map(|s| s.errors());
    for (f, p) in dist.probabilities().iter().enumerate() {
        let idx = l.index_at(f);
        if l.dims() == 1 {
            write!(w, "{},{p}", idx.x)?;
        } else {
            write!(w, "{},{},{p}", idx.x, idx.y)?;
        }
        if let (Some(s), Some(e)) = (sample, &errors) {
            write!(w, ",{},{}", s.counts[f], e[f])?;
        }
        writeln!(w)?;
    }
    Ok(())
}
