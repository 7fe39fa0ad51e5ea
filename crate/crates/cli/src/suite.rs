//! Batch execution of every scenario in a directory.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::pipeline::{run_scenario, RunOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub path: PathBuf,
    pub name: String,
    pub passed: bool,
    pub fidelity: Option<f64>,
    pub similarity: Option<f64>,
    pub error: Option<String>,
}

/// Scenario files (`.toml`, `.json`) directly inside `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir.display().to_string(), e))?.path();
        let ext = path.extension().and_then(|e| e.to_str());
        if path.is_file() && matches!(ext, Some("toml") | Some("json")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn run_suite(dir: &Path, opts: &RunOptions) -> CliResult<Vec<SuiteRow>> {
    let files = scenario_files(dir)?;
    let rows: Vec<SuiteRow> = files
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("?").to_string();
            match run_scenario(path, opts) {
                Ok(out) => SuiteRow {
                    path: path.clone(),
                    name: out.report.name.clone(),
                    passed: out.report.passed,
                    fidelity: Some(out.report.transfer_fidelity),
                    similarity: out.report.similarity_sampled.or(out.report.similarity_noiseless),
                    error: None,
                },
                Err(e) => SuiteRow {
                    path: path.clone(),
                    name: stem,
                    passed: false,
                    fidelity: None,
                    similarity: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(rows)
}

pub fn summary_csv(rows: &[SuiteRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("name,passed,fidelity,similarity,error\n");
    for r in rows {
        let err = r.error.as_deref().unwrap_or("").replace(['"', '\n'], " ");
        out.push_str(&format!(
            "{},{},{},{},\"{}\"\n",
            r.name,
            r.passed,
            opt(r.fidelity),
            opt(r.similarity),
            err
        ));
    }
    out
}

pub fn table(rows: &[SuiteRow]) -> String {
    let mut out = format!("{:<28} {:<6} {:>14} {:>12}\n", "scenario", "status", "fidelity", "similarity");
    for r in rows {
        let f = r.fidelity.map(|v| format!("{v:.12}")).unwrap_or_else(|| "-".into());
        let s = r.similarity.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<28} {:<6} {:>14} {:>12}\n", r.name, status, f, s));
        if let Some(e) = &r.error {
            out.push_str(&format!("    {e}\n"));
        }
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} scenarios, {} passed, {} failed\n", rows.len(), rows.len() - failed, failed));
    out
}

pub fn write_summary(rows: &[SuiteRow], path: &Path) -> CliResult<()> {
    write_atomic(path, summary_csv(rows).as_bytes())
}
