//! Gerchberg–Saxton phase retrieval from near- and far-field amplitudes.
//!
//! The far-field intensity is given centred (zero frequency at
//! `(rows/2, cols/2)`, as produced by [`crate::optics::far_field`] with one
//! pixel per mode) on the same grid as the near-field amplitude.

use std::f64::consts::PI;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{ifftshift, Fft2};
use crate::mask::wrap_phase;
use crate::optics::PixelImage;

/// Window over which the early-stop rule measures improvement.
pub const STOP_WINDOW: usize = 10;
/// Twin alignments must beat the direct one by this factor to be preferred.
pub const TWIN_MARGIN: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceNorm {
    #[default]
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GsConfig {
    pub n_runs: usize,
    pub n_iters: usize,
    pub seed: u64,
    /// Stop a run once the error improved by less than this over
    /// [`STOP_WINDOW`] iterations.
    pub stop_tolerance: Option<f64>,
    /// Metric used to pick the best run.
    pub selection: DistanceNorm,
}

impl Default for GsConfig {
    fn default() -> Self {
        Self::one_d()
    }
}

impl GsConfig {
    pub fn one_d() -> Self {
        Self {
            n_runs: 200,
            n_iters: 200,
            seed: 0,
            stop_tolerance: None,
            selection: DistanceNorm::L1,
        }
    }

    pub fn two_d() -> Self {
        Self {
            n_runs: 100,
            n_iters: 100,
            ..Self::one_d()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 || self.n_iters == 0 {
            return Err(Error::InvalidConfig("n_runs and n_iters must be >= 1".into()));
        }
        if let Some(t) = self.stop_tolerance {
            if !(t >= 0.0) {
                return Err(Error::InvalidConfig(format!("stop tolerance {t} must be >= 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub index: usize,
    /// Selection metric after the last iteration.
    pub final_error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsResult {
    /// Retrieved near-field phase in `(-π, π]`, with the amplitude-weighted
    /// circular mean removed.
    pub phase: Array2<f64>,
    /// L2 amplitude error of the best run, one entry per iteration.
    pub error_trace: Vec<f64>,
    pub best_run_index: usize,
    pub final_error: f64,
    pub runs: Vec<RunSummary>,
}

fn distance(field: &Array2<Complex64>, target: &Array2<f64>, norm: DistanceNorm) -> f64 {
    match norm {
        DistanceNorm::L1 => Zip::from(field).and(target).fold(0.0, |acc, f, a| acc + (f.norm() - a).abs()),
        DistanceNorm::L2 => Zip::from(field)
            .and(target)
            .fold(0.0, |acc, f, a| acc + (f.norm() - a).powi(2))
            .sqrt(),
    }
}

/// `Σ | |f| - a |` over all pixels.
pub fn error_metric(field: &Array2<Complex64>, target_amp: &Array2<f64>) -> Result<f64> {
    check_shapes(field.dim(), target_amp.dim())?;
    Ok(distance(field, target_amp, DistanceNorm::L1))
}

/// `‖ |f| - a ‖₂`; non-increasing along a GS run.
pub fn error_metric_l2(field: &Array2<Complex64>, target_amp: &Array2<f64>) -> Result<f64> {
    check_shapes(field.dim(), target_amp.dim())?;
    Ok(distance(field, target_amp, DistanceNorm::L2))
}

fn check_shapes(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

fn check_amplitude(name: &'static str, grid: &Array2<f64>) -> Result<()> {
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(name));
    }
    if grid.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidConfig(format!("{name} must be non-negative")));
    }
    if !(grid.sum() > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(())
}

/// Retrieves the near-field phase from a one-pixel-per-mode far-field image.
pub fn gs_retrieve(near_amp: &Array2<f64>, far: &PixelImage, cfg: &GsConfig) -> Result<GsResult> {
    if far.pixels_per_mode() != 1 {
        return Err(Error::GridMismatch(format!(
            "phase retrieval needs one pixel per mode, image has {}",
            far.pixels_per_mode()
        )));
    }
    gs_retrieve_grid(near_amp, far.data(), cfg)
}

/// Error-reduction GS with `cfg.n_runs` random starts, run in parallel; the
/// best run is the lowest selection error, ties broken by run index.
pub fn gs_retrieve_grid(near_amp: &Array2<f64>, far_intensity: &Array2<f64>, cfg: &GsConfig) -> Result<GsResult> {
    cfg.validate()?;
    check_shapes(near_amp.dim(), far_intensity.dim())?;
    check_amplitude("near amplitude", near_amp)?;
    check_amplitude("far intensity", far_intensity)?;

    let (rows, cols) = near_amp.dim();
    let mut far_amp = ifftshift(far_intensity).mapv(f64::sqrt);
    // Parseval fixes the far scale for an unnormalized forward transform
    let near_energy: f64 = near_amp.iter().map(|a| a * a).sum();
    let far_energy: f64 = far_amp.iter().map(|a| a * a).sum();
    far_amp *= ((rows * cols) as f64 * near_energy / far_energy).sqrt();

    let plan = Fft2::new(rows, cols);
    let runs: Vec<(Vec<f64>, f64, Array2<Complex64>)> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|run| single_run(near_amp, &far_amp, &plan, cfg, run))
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("n_runs >= 1");
    let summaries = runs
        .iter()
        .enumerate()
        .map(|(index, r)| RunSummary {
            index,
            final_error: r.1,
            iterations: r.0.len(),
        })
        .collect();
    let (trace, final_error, field) = runs.into_iter().nth(best).expect("best run exists");
    let mean: Complex64 = field.iter().sum();
    let offset = if mean.norm() > 0.0 { mean.arg() } else { 0.0 };
    Ok(GsResult {
        phase: field.mapv(|v| wrap_phase(v.arg() - offset)),
        error_trace: trace,
        best_run_index: best,
        final_error,
        runs: summaries,
    })
}

fn single_run(
    near_amp: &Array2<f64>,
    far_amp: &Array2<f64>,
    plan: &Fft2,
    cfg: &GsConfig,
    run: usize,
) -> (Vec<f64>, f64, Array2<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run as u64);
    let mut g = near_amp.mapv(|a| Complex64::from_polar(a, rng.random_range(-PI..PI)));
    let mut trace = Vec::with_capacity(cfg.n_iters);
    loop {
        plan.forward(&mut g);
        Zip::from(&mut g).and(far_amp).for_each(|v, a| *v = impose(*v, *a));
        plan.inverse(&mut g);
        trace.push(distance(&g, near_amp, DistanceNorm::L2));
        let n = trace.len();
        let stalled = cfg
            .stop_tolerance
            .is_some_and(|tol| n > STOP_WINDOW && trace[n - 1 - STOP_WINDOW] - trace[n - 1] < tol);
        if n == cfg.n_iters || stalled {
            break;
        }
        Zip::from(&mut g).and(near_amp).for_each(|v, a| *v = impose(*v, *a));
    }
    let final_error = distance(&g, near_amp, cfg.selection);
    let constrained = Zip::from(&g).and(near_amp).map_collect(|v, a| impose(*v, *a));
    (trace, final_error, constrained)
}

fn impose(v: Complex64, amp: f64) -> Complex64 {
    let n = v.norm();
    if n > 0.0 {
        v * (amp / n)
    } else {
        Complex64::new(amp, 0.0)
    }
}

/// Best alignment of a retrieved phase against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    /// Retrieved phase after the ambiguity transform, wrapped to `(-π, π]`.
    pub aligned: Array2<f64>,
    /// Weighted RMS of the wrapped residual, radians.
    pub rms: f64,
    /// The conjugate-reflected twin `-φ(-x)` was used.
    pub twin: bool,
    /// Circular translation `(rows, cols)` applied, `aligned(x) = φ(x - s)`.
    pub shift: (usize, usize),
    pub offset: f64,
}

/// Aligns with uniform weights.
pub fn align_phase(retrieved: &Array2<f64>, reference: &Array2<f64>) -> Result<Alignment> {
    align_phase_weighted(retrieved, reference, &Array2::ones(reference.dim()))
}

/// Removes the GS ambiguities (global offset, circular translation, twin)
/// by maximizing `|Σ w e^{i(ref - ret)}|`.
pub fn align_phase_weighted(retrieved: &Array2<f64>, reference: &Array2<f64>, weights: &Array2<f64>) -> Result<Alignment> {
    check_shapes(retrieved.dim(), reference.dim())?;
    check_shapes(weights.dim(), reference.dim())?;
    check_amplitude("alignment weights", weights)?;
    let (rows, cols) = reference.dim();
    let direct = align_translated(retrieved, reference, weights, false);
    let twin_phase = Array2::from_shape_fn((rows, cols), |(r, c)| -retrieved[[(rows - r) % rows, (cols - c) % cols]]);
    let twin = align_translated(&twin_phase, reference, weights, true);
    Ok(if twin.rms < TWIN_MARGIN * direct.rms { twin } else { direct })
}

fn align_translated(ret: &Array2<f64>, reference: &Array2<f64>, w: &Array2<f64>, twin: bool) -> Alignment {
    let (rows, cols) = reference.dim();
    let plan = Fft2::new(rows, cols);
    let mut a = Zip::from(reference).and(w).map_collect(|p, w| Complex64::from_polar(*w, *p));
    let mut b = ret.mapv(|p| Complex64::from_polar(1.0, p));
    plan.forward(&mut a);
    plan.forward(&mut b);
    // C(s) = Σ_x A(x) conj(B(x - s))
    let mut corr = Zip::from(&a).and(&b).map_collect(|x, y| x * y.conj());
    plan.inverse(&mut corr);
    let ((sr, sc), peak) = corr
        .indexed_iter()
        .max_by(|(i, x), (j, y)| x.norm().total_cmp(&y.norm()).then(j.cmp(i)))
        .map(|(i, v)| (i, *v))
        .expect("non-empty grid");
    let offset = peak.arg();
    let aligned = Array2::from_shape_fn((rows, cols), |(r, c)| {
        wrap_phase(ret[[(r + rows - sr) % rows, (c + cols - sc) % cols]] + offset)
    });
    let rms = weighted_rms(&aligned, reference, w);
    Alignment {
        aligned,
        rms,
        twin,
        shift: (sr, sc),
        offset,
    }
}

fn weighted_rms(a: &Array2<f64>, b: &Array2<f64>, w: &Array2<f64>) -> f64 {
    let num = Zip::from(a).and(b).and(w).fold(0.0, |acc, x, y, w| acc + w * wrap_phase(x - y).powi(2));
    (num / w.sum()).sqrt()
}

/// Relative L1 mismatch `Σ|I_ret - I| / Σ I` between the far field of
/// `a e^{iφ}` and a centred target intensity, both normalized to unit sum.
pub fn forward_intensity_error(phase: &Array2<f64>, near_amp: &Array2<f64>, far_intensity: &Array2<f64>) -> Result<f64> {
    check_shapes(phase.dim(), near_amp.dim())?;
    check_shapes(phase.dim(), far_intensity.dim())?;
    check_amplitude("far intensity", far_intensity)?;
    let (rows, cols) = phase.dim();
    let mut f = Zip::from(near_amp).and(phase).map_collect(|a, p| Complex64::from_polar(*a, *p));
    Fft2::new(rows, cols).forward(&mut f);
    let ret = f.mapv(|v| v.norm_sqr());
    let target = ifftshift(far_intensity);
    let (rs, ts) = (ret.sum(), target.sum());
    if !(rs > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(Zip::from(&ret).and(&target).fold(0.0, |acc, r, t| acc + (r / rs - t / ts).abs()))
}
