//! Planned 2D transforms over row-major `Array2<Complex64>` grids.
//!
//! 1D signals are stored as single-row grids, in which case the column pass
//! is skipped.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Unnormalized forward DFT, `X_k = Σ_j x_j e^{-2πi jk/n}` along both axes.
    pub fn forward(&self, grid: &mut Array2<Complex64>) {
        self.run(grid, &self.row_fwd, &self.col_fwd);
    }

    /// Inverse DFT including the `1/(rows·cols)` factor.
    pub fn inverse(&self, grid: &mut Array2<Complex64>) {
        self.run(grid, &self.row_inv, &self.col_inv);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        grid.mapv_inplace(|v| v * scale);
    }

    fn run(&self, grid: &mut Array2<Complex64>, row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        assert_eq!(grid.dim(), (self.rows, self.cols), "grid shape does not match plan");
        if !grid.is_standard_layout() {
            *grid = grid.as_standard_layout().into_owned();
        }
        row.process(grid.as_slice_mut().expect("standard layout"));
        if self.rows > 1 {
            let mut buf = vec![Complex64::new(0.0, 0.0); self.rows];
            for mut column in grid.columns_mut() {
                for (b, v) in buf.iter_mut().zip(column.iter()) {
                    *b = *v;
                }
                col.process(&mut buf);
                for (v, b) in column.iter_mut().zip(&buf) {
                    *v = *b;
                }
            }
        }
    }
}

/// Signed frequency of DFT bin `k` out of `n`.
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// DFT bin holding signed frequency `m`.
pub fn bin_of(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Moves the zero frequency to index `(rows/2, cols/2)`.
pub fn fftshift<T: Clone>(grid: &Array2<T>) -> Array2<T> {
    let (rows, cols) = grid.dim();
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        grid[[(r + rows - rows / 2) % rows, (c + cols - cols / 2) % cols]].clone()
    })
}

/// Inverse of [`fftshift`].
pub fn ifftshift<T: Clone>(grid: &Array2<T>) -> Array2<T> {
    let (rows, cols) = grid.dim();
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        grid[[(r + rows / 2) % rows, (c + cols / 2) % cols]].clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn roundtrip_2d() {
        let mut g = Array2::from_shape_fn((6, 10), |(r, c)| {
            Complex64::new((r * 3 + c) as f64, (r as f64 - c as f64).sin())
        });
        let orig = g.clone();
        let plan = Fft2::new(6, 10);
        plan.forward(&mut g);
        plan.inverse(&mut g);
        for (a, b) in g.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_harmonic_lands_on_bin() {
        let n = 16;
        let mut g = Array2::from_shape_fn((1, n), |(_, j)| {
            Complex64::from_polar(1.0, -2.0 * PI * 3.0 * j as f64 / n as f64)
        });
        Fft2::new(1, n).forward(&mut g);
        let k = bin_of(-3, n);
        assert!((g[[0, k]].re - n as f64).abs() < 1e-9);
        assert_eq!(signed_frequency(k, n), -3);
    }

    #[test]
    fn shift_centers_zero() {
        let g = Array2::from_shape_fn((4, 5), |(r, c)| r * 10 + c);
        let s = fftshift(&g);
        assert_eq!(s[[2, 2]], 0);
        assert_eq!(s[[2, 3]], 1);
        assert_eq!(s[[2, 1]], 4);
    }

    #[test]
    fn ifftshift_inverts_odd_and_even() {
        let g = Array2::from_shape_fn((5, 6), |(r, c)| r * 10 + c);
        assert_eq!(ifftshift(&fftshift(&g)), g);
        assert_eq!(fftshift(&ifftshift(&g)), g);
    }
}
