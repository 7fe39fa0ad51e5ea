//! Atomic file output and plot-ready tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use qtransfer_core::export::{write_grid_binary, write_grid_csv};

use crate::error::{CliError, CliResult};
use crate::pipeline::RunReport;

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let ctx = |e| CliError::io(path.display().to_string(), e);
    let mut f = fs::File::create(&tmp).map_err(ctx)?;
    f.write_all(bytes).map_err(ctx)?;
    f.sync_all().map_err(ctx)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        ctx(e)
    })
}

pub fn grid_csv_bytes(grid: &Array2<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_grid_csv(grid, &mut buf).expect("writing to memory");
    buf
}

pub fn grid_binary_bytes(grid: &Array2<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_grid_binary(grid, &mut buf).expect("writing to memory");
    buf
}

/// Reference and retrieved phases of a retrieval run.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrids {
    pub reference: Array2<f64>,
    pub retrieved: Array2<f64>,
}

/// Per-mode CSV: `m` (or `m_x,m_y`), `P_theory`, and when sampled
/// `P_sampled,poisson_error`.
pub fn modes_csv(report: &RunReport) -> String {
    let sampled = report.modes.iter().all(|r| r.p_sampled.is_some()) && !report.modes.is_empty();
    let mut out = String::new();
    out.push_str(if report.dims == 1 { "m" } else { "m_x,m_y" });
    out.push_str(",P_theory");
    if sampled {
        out.push_str(",P_sampled,poisson_error");
    }
    out.push('\n');
    for row in &report.modes {
        if report.dims == 1 {
            out.push_str(&format!("{},{}", row.m, row.p_theory));
        } else {
            out.push_str(&format!("{},{},{}", row.m, row.m_y.unwrap_or(0), row.p_theory));
        }
        if sampled {
            out.push_str(&format!(
                ",{},{}",
                row.p_sampled.unwrap_or(0.0),
                row.poisson_error.unwrap_or(0.0)
            ));
        }
        out.push('\n');
    }
    out
}

/// Writes `modes.csv` and, with retrieval data, the aligned phase grids.
pub fn emit_plot_data(report: &RunReport, phases: Option<&PhaseGrids>, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let modes = dir.join("modes.csv");
    write_atomic(&modes, modes_csv(report).as_bytes())?;
    written.push(modes);
    if let Some(p) = phases {
        for (name, grid) in [("phase_reference.csv", &p.reference), ("phase_retrieved.csv", &p.retrieved)] {
            let path = dir.join(name);
            write_atomic(&path, &grid_csv_bytes(grid))?;
            written.push(path);
        }
    }
    Ok(written)
}
