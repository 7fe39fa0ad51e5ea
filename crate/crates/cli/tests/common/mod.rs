#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// `J_n(x)` by its power series; accurate to ~1e-15 for |x| < 10.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let k = n.unsigned_abs() as i32;
    let half = x / 2.0;
    let mut term = half.powi(k) / (1..=k).map(f64::from).product::<f64>();
    let mut sum = term;
    for j in 1..80 {
        term *= -half * half / (f64::from(j) * f64::from(j + k));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    if n < 0 && k % 2 == 1 {
        -sum
    } else {
        sum
    }
}

pub fn qtransfer(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtransfer"))
        .args(args)
        .env("QTRANSFER_OUT", out)
        .output()
        .expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// Parses a CSV with a header into (header, rows of f64).
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}
