//! Sampled-field model of the bench: hologram synthesis, far-field imaging,
//! camera binning and shot noise.
//!
//! The far field is a plain DFT of the hologram plane. The camera samples
//! `pixels_per_mode` pixels per momentum quantum; this is modelled by an
//! aperture of `pixels_per_mode` mask periods, which puts every mode on its
//! own pixel grid line with no sidelobes bleeding between neighbouring bins.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{bin_of, fftshift, Fft2};
use crate::lattice::{Distribution, LatticeSpec, MomentumIndex};
use crate::mask::PhaseMask;
use crate::unitary::ConvolutionKernel;

pub const DEFAULT_PIXELS_PER_MODE: usize = 5;
pub const DEFAULT_WINDOW: usize = 9;
pub const DEFAULT_COUNTS: u64 = 10_000;
/// Blaze period as a fraction of the mask period.
pub const DEFAULT_BLAZE_FRACTION: f64 = 1.0 / 50.0;
pub const DEFAULT_SAMPLES_PER_BLAZE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodeMode {
    #[default]
    PhaseOnly,
    /// Phase and amplitude on the first order of a blazed carrier.
    Bolduc,
}

/// What to display on the modulator.
#[derive(Debug, Clone, PartialEq)]
pub struct HologramSpec {
    pub mask: PhaseMask,
    /// Target amplitude per `x` sample, in `[0, 1]`; `None` means uniform.
    pub amplitude: Option<Vec<f64>>,
    /// Blaze period Λ_y along `y`, in the same length unit as the mask period.
    pub blaze_period: f64,
    pub encode: EncodeMode,
    pub samples_per_blaze: usize,
}

impl HologramSpec {
    pub fn phase_only(mask: PhaseMask) -> Self {
        let blaze_period = mask.lattice().period() * DEFAULT_BLAZE_FRACTION;
        Self {
            mask,
            amplitude: None,
            blaze_period,
            encode: EncodeMode::PhaseOnly,
            samples_per_blaze: DEFAULT_SAMPLES_PER_BLAZE,
        }
    }

    /// Bolduc encoding of an arbitrary 1D complex field sampled over one
    /// period; the amplitude is scaled so its maximum is one.
    pub fn for_field(lattice: &LatticeSpec, field: &[Complex64]) -> Result<Self> {
        if lattice.dims() != 1 {
            return Err(Error::InvalidConfig("complex-field holograms are 1D".into()));
        }
        let peak = field.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let phase = Array2::from_shape_fn((1, field.len()), |(_, j)| field[j].arg());
        let mask = PhaseMask::from_grid(*lattice, phase, [0.0, 0.0])?;
        Ok(Self {
            blaze_period: lattice.period() * DEFAULT_BLAZE_FRACTION,
            mask,
            amplitude: Some(field.iter().map(|c| c.norm() / peak).collect()),
            encode: EncodeMode::Bolduc,
            samples_per_blaze: DEFAULT_SAMPLES_PER_BLAZE,
        })
    }

    fn validate(&self) -> Result<()> {
        if let Some(a) = &self.amplitude {
            if a.len() != self.mask.samples_per_period() {
                return Err(Error::GridMismatch(format!(
                    "amplitude has {} samples, mask has {}",
                    a.len(),
                    self.mask.samples_per_period()
                )));
            }
            if let Some(bad) = a.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::AmplitudeOutOfRange(*bad));
            }
        }
        if self.encode == EncodeMode::Bolduc {
            if self.mask.dims() != 1 {
                return Err(Error::InvalidConfig("Bolduc encoding is applied along x of a 1D mask".into()));
            }
            let period = self.mask.lattice().period();
            if !(self.blaze_period > 0.0 && self.blaze_period < period / 10.0) {
                return Err(Error::InvalidConfig(format!(
                    "blaze period {} must be below a tenth of the mask period {period}",
                    self.blaze_period
                )));
            }
            let cycles = period / self.blaze_period;
            if (cycles - cycles.round()).abs() > 1e-6 {
                return Err(Error::InvalidConfig(format!(
                    "mask period must hold a whole number of blaze periods, got {cycles}"
                )));
            }
            if self.samples_per_blaze < 2 {
                return Err(Error::InvalidConfig("need at least 2 samples per blaze period".into()));
            }
        }
        Ok(())
    }
}

/// Sampled hologram over one mask period per axis; rows run along `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hologram {
    pub phase: Array2<f64>,
    /// Blaze periods across the `y` window (0 without a carrier).
    pub carrier_cycles: usize,
}

impl Hologram {
    pub fn field(&self) -> Array2<Complex64> {
        self.phase.mapv(|p| Complex64::from_polar(1.0, p))
    }
}

/// Inverse of `sinc(t) = sin t / t` on `[-π, 0]`.
fn inverse_sinc(a: f64) -> f64 {
    if a >= 1.0 {
        return 0.0;
    }
    if a <= 0.0 {
        return -PI;
    }
    let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
    let (mut lo, mut hi) = (-PI, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sinc(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Renders the modulator pattern.
///
/// Phase-only holograms replicate `φ(x)` (tilt included) along `y`. Bolduc
/// holograms display `Ψ = M(x)·mod(F(x) + 2πy/Λ_y, 2π)` with
/// `M = 1 + sinc⁻¹(a)/π` and `F = φ - πM`, whose first diffraction order
/// along `y` carries `a(x) e^{i(φ(x) - π)}`.
pub fn synthesize_hologram(spec: &HologramSpec) -> Result<Hologram> {
    spec.validate()?;
    let total = spec.mask.total_phase();
    let cols = total.ncols();
    match spec.encode {
        EncodeMode::PhaseOnly => {
            let rows = if spec.mask.dims() == 1 { cols } else { total.nrows() };
            let phase = if spec.mask.dims() == 1 {
                Array2::from_shape_fn((rows, cols), |(_, c)| total[[0, c]])
            } else {
                total
            };
            Ok(Hologram {
                phase,
                carrier_cycles: 0,
            })
        }
        EncodeMode::Bolduc => {
            let cycles = (spec.mask.lattice().period() / spec.blaze_period).round() as usize;
            let rows = cycles * spec.samples_per_blaze;
            let ones = vec![1.0; cols];
            let amp = spec.amplitude.as_deref().unwrap_or(&ones);
            let depth: Vec<f64> = amp.iter().map(|&a| 1.0 + inverse_sinc(a) / PI).collect();
            let phase = Array2::from_shape_fn((rows, cols), |(r, c)| {
                let m = depth[c];
                let offset = total[[0, c]] - PI * m;
                let carrier = 2.0 * PI * (cycles * r) as f64 / rows as f64;
                m * (offset + carrier).rem_euclid(2.0 * PI)
            });
            Ok(Hologram {
                phase,
                carrier_cycles: cycles,
            })
        }
    }
}

/// Demodulated first-order field along `x`, keeping `y` frequencies within
/// `carrier ± band_halfwidth` (0 keeps one mode spacing around the carrier).
pub fn extract_first_order(hologram: &Hologram, band_halfwidth: usize) -> Result<Vec<Complex64>> {
    if hologram.carrier_cycles == 0 {
        return Err(Error::InvalidConfig("hologram has no blazed carrier".into()));
    }
    let mut spectrum = hologram.field();
    let (rows, cols) = spectrum.dim();
    if 2 * band_halfwidth + 1 > hologram.carrier_cycles {
        return Err(Error::InvalidConfig("extraction band overlaps the zeroth order".into()));
    }
    let plan = Fft2::new(rows, cols);
    plan.forward(&mut spectrum);
    let mut band = Array2::<Complex64>::zeros((1, cols));
    for dr in -(band_halfwidth as i64)..=band_halfwidth as i64 {
        let r = (hologram.carrier_cycles as i64 + dr).rem_euclid(rows as i64) as usize;
        for c in 0..cols {
            band[[0, c]] += spectrum[[r, c]];
        }
    }
    Fft2::new(1, cols).inverse(&mut band);
    Ok(band.iter().map(|v| v / rows as f64).collect())
}

/// `|<a|b>|^2 / (|a|^2 |b|^2)` for sampled fields.
pub fn field_fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    (overlap.norm_sqr() / (na * nb)).clamp(0.0, 1.0)
}

/// Camera-plane intensities, zero frequency at `(rows/2, cols/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelImage {
    data: Array2<f64>,
    dims: usize,
    pixels_per_mode: usize,
    period: f64,
}

impl PixelImage {
    pub fn new(data: Array2<f64>, dims: usize, pixels_per_mode: usize, period: f64) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("pixel image"));
        }
        if data.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidConfig("pixel intensities must be non-negative".into()));
        }
        if pixels_per_mode == 0 || !(dims == 1 || dims == 2) || data.is_empty() {
            return Err(Error::InvalidConfig("invalid image metadata".into()));
        }
        if dims == 1 && data.nrows() != 1 {
            return Err(Error::GridMismatch("1D images have a single row".into()));
        }
        Ok(Self {
            data,
            dims,
            pixels_per_mode,
            period,
        })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    pub fn pixels_per_mode(&self) -> usize {
        self.pixels_per_mode
    }

    /// Momentum per pixel, `Δk / pixels_per_mode`.
    pub fn pixel_pitch(&self) -> f64 {
        2.0 * PI / self.period / self.pixels_per_mode as f64
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn total(&self) -> f64 {
        self.data.sum()
    }
}

/// Far-field intensity of one mask period, `pixels_per_mode` pixels per mode.
pub fn far_field(mask: &PhaseMask, pixels_per_mode: usize) -> Result<PixelImage> {
    far_field_of(&mask.field(), mask.dims(), mask.lattice().period(), pixels_per_mode)
}

/// Far-field intensity of a complex field sampled over one period per axis
/// (single row for 1D fields).
pub fn far_field_of(field: &Array2<Complex64>, dims: usize, period: f64, pixels_per_mode: usize) -> Result<PixelImage> {
    if pixels_per_mode == 0 {
        return Err(Error::InvalidConfig("pixels_per_mode must be >= 1".into()));
    }
    let (rows, cols) = field.dim();
    if dims == 1 && rows != 1 {
        return Err(Error::GridMismatch("1D field must be a single row".into()));
    }
    let p = pixels_per_mode;
    let (tr, tc) = if dims == 1 { (1, p) } else { (p, p) };
    let mut tiled = Array2::from_shape_fn((rows * tr, cols * tc), |(r, c)| field[[r % rows, c % cols]]);
    let (hr, hc) = tiled.dim();
    Fft2::new(hr, hc).forward(&mut tiled);
    let norm = ((hr * hc) as f64).powi(2);
    let intensity = tiled.mapv(|v| v.norm_sqr() / norm);
    PixelImage::new(fftshift(&intensity), dims, p, period)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraSpec {
    pub pixels_per_mode: usize,
    /// Displayed modes `|m| <= window` per axis.
    pub window: usize,
    pub counts_total: u64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self {
            pixels_per_mode: DEFAULT_PIXELS_PER_MODE,
            window: DEFAULT_WINDOW,
            counts_total: DEFAULT_COUNTS,
        }
    }
}

/// Binned distribution plus the fraction of light outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedModes {
    pub distribution: Distribution,
    pub leakage: f64,
}

/// Sums each mode-centred block of `pixels_per_mode` pixels (per axis) over
/// the window and renormalizes.
pub fn bin_to_modes(img: &PixelImage, cam: &CameraSpec) -> Result<BinnedModes> {
    if cam.pixels_per_mode != img.pixels_per_mode {
        return Err(Error::GridMismatch(format!(
            "camera expects {} pixels per mode, image has {}",
            cam.pixels_per_mode, img.pixels_per_mode
        )));
    }
    let p = img.pixels_per_mode as i64;
    let lo = -((p - 1) / 2);
    let hi = p / 2;
    let w = cam.window as i64;
    let span = |len: usize| -> Result<i64> {
        let center = (len / 2) as i64;
        if center - w * p + lo < 0 || center + w * p + hi >= len as i64 {
            return Err(Error::WindowExceedsImage { window: cam.window });
        }
        Ok(center)
    };
    let cx = span(img.width())?;
    let cy = if img.dims == 2 { span(img.height())? } else { 0 };

    let lattice = LatticeSpec::new(img.dims, 2 * cam.window + 1, img.period)?;
    let mut weights = vec![0.0; lattice.mode_count()];
    let y_range = if img.dims == 2 { lo..=hi } else { 0..=0 };
    for idx in lattice.indices() {
        let mut acc = 0.0;
        for dy in y_range.clone() {
            let r = if img.dims == 2 { cy + idx.y as i64 * p + dy } else { 0 };
            for dx in lo..=hi {
                acc += img.data[[r as usize, (cx + idx.x as i64 * p + dx) as usize]];
            }
        }
        weights[lattice.flat_unchecked(idx)] = acc;
    }
    let inside: f64 = weights.iter().sum();
    let total = img.total();
    let leakage = if total > 0.0 { (1.0 - inside / total).max(0.0) } else { 0.0 };
    Ok(BinnedModes {
        distribution: Distribution::from_weights(lattice, weights)?,
        leakage,
    })
}

/// Poisson-sampled counts per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSample {
    pub counts: Vec<u64>,
    /// Empirical frequencies; `None` when no photon was counted.
    pub frequencies: Option<Distribution>,
}

impl PoissonSample {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `√n / total` per bin.
    pub fn errors(&self) -> Vec<f64> {
        let t = self.total().max(1) as f64;
        self.counts.iter().map(|&n| (n as f64).sqrt() / t).collect()
    }
}

/// Independent Poisson draws with means `counts_total · P(m)`.
pub fn sample_poisson(p: &Distribution, counts_total: u64, seed: u64) -> Result<PoissonSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(p.probabilities().len());
    for &prob in p.probabilities() {
        let mean = counts_total as f64 * prob;
        let n = if mean > 0.0 {
            let dist = Poisson::new(mean).map_err(|e| Error::InvalidConfig(format!("poisson mean {mean}: {e}")))?;
            dist.sample(&mut rng) as u64
        } else {
            0
        };
        counts.push(n);
    }
    let frequencies = if counts.iter().any(|&n| n > 0) {
        Some(Distribution::from_weights(
            *p.lattice(),
            counts.iter().map(|&n| n as f64).collect(),
        )?)
    } else {
        None
    };
    Ok(PoissonSample { counts, frequencies })
}

/// Similarity `s = (Σ_m √(P_exp P_th))²`.
pub fn similarity(p_exp: &Distribution, p_th: &Distribution) -> Result<f64> {
    if p_exp.lattice() != p_th.lattice() {
        return Err(Error::LatticeMismatch(format!(
            "similarity window {} vs {}",
            p_exp.lattice(),
            p_th.lattice()
        )));
    }
    let b: f64 = p_exp
        .probabilities()
        .iter()
        .zip(p_th.probabilities())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok((b * b).clamp(0.0, 1.0))
}

/// Far-field binned distribution restricted to the camera window, shifted
/// so the mode at `k0` of the signal projection lands as `|m - k0>`.
pub fn heralded_window(binned: &Distribution, k0: MomentumIndex) -> Result<Distribution> {
    let l = *binned.lattice();
    let mut w = vec![0.0; l.mode_count()];
    for (f, p) in binned.probabilities().iter().enumerate() {
        let to = l.index_at(f) - k0;
        if l.contains(to) {
            w[l.flat_unchecked(to)] += p;
        }
    }
    Distribution::from_weights(l, w)
}

/// Field `Σ_m v_m e^{i m Δk x}` sampled at `samples` points per period per
/// axis (single row in 1D).
pub fn field_from_kernel(kernel: &ConvolutionKernel, samples: usize) -> Result<Array2<Complex64>> {
    let l = kernel.lattice();
    let required = 2 * l.half_width() as usize + 1;
    if samples < required {
        return Err(Error::Undersampled {
            samples,
            half_width: l.half_width() as usize,
            required,
        });
    }
    let rows = if l.dims() == 1 { 1 } else { samples };
    let mut grid = Array2::<Complex64>::zeros((rows, samples));
    for (f, c) in kernel.coefficients().iter().enumerate() {
        let idx = l.index_at(f);
        grid[[bin_of(idx.y as i64, rows), bin_of(idx.x as i64, samples)]] = *c;
    }
    Fft2::new(rows, samples).inverse(&mut grid);
    grid.mapv_inplace(|v| v * (rows * samples) as f64);
    Ok(grid)
}

/// Encodes a 1D kernel field with a blazed Bolduc hologram, extracts the
/// first order and images it onto the camera.
pub fn simulate_bolduc(kernel: &ConvolutionKernel, samples: usize, cam: &CameraSpec) -> Result<BinnedModes> {
    let l = *kernel.lattice();
    let field = field_from_kernel(kernel, samples)?;
    let spec = HologramSpec::for_field(&l, field.as_slice().expect("standard layout"))?;
    let first = extract_first_order(&synthesize_hologram(&spec)?, 0)?;
    let row = Array2::from_shape_vec((1, first.len()), first).expect("single row");
    bin_to_modes(&far_field_of(&row, 1, l.period(), cam.pixels_per_mode)?, cam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{preset, PhaseProfile, PhaseTerm};
    use crate::unitary::{kernel_from_phase, kernel_from_phase_2d};

    fn line(n: usize) -> LatticeSpec {
        LatticeSpec::line(n).unwrap()
    }

    #[test]
    fn flat_mask_single_spot() {
        let l = line(19);
        let mask = PhaseMask::sample(&PhaseProfile::new(1, vec![]).unwrap(), &l, 128).unwrap();
        let img = far_field(&mask, 5).unwrap();
        let c = img.width() / 2;
        assert!((img.data()[[0, c]] - 1.0).abs() < 1e-12);
        assert!((img.total() - 1.0).abs() < 1e-12);
        let binned = bin_to_modes(&img, &CameraSpec::default()).unwrap();
        assert!((binned.distribution.probability(MomentumIndex::ZERO).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tilt_moves_spot_one_mode() {
        let l = line(19);
        let p = PhaseProfile::new(
            1,
            vec![PhaseTerm::Linear {
                slope: 1.0,
                axis: crate::mask::Axis::X,
            }],
        )
        .unwrap();
        let img = far_field(&PhaseMask::sample(&p, &l, 128).unwrap(), 5).unwrap();
        let c = img.width() / 2;
        assert!((img.data()[[0, c + 5]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_spots_split_evenly() {
        let l = line(19);
        // cos(Δk x) field amplitude gives equal weight on ±1
        let field = Array2::from_shape_fn((1, 64), |(_, j)| {
            Complex64::new((2.0 * PI * j as f64 / 64.0).cos(), 0.0)
        });
        let img = far_field_of(&field, 1, l.period(), 5).unwrap();
        let d = bin_to_modes(&img, &CameraSpec::default()).unwrap().distribution;
        assert!((d.probability(MomentumIndex::new(-1)).unwrap() - 0.5).abs() < 1e-12);
        assert!((d.probability(MomentumIndex::new(1)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_larger_than_image_rejected() {
        let l = line(19);
        let mask = PhaseMask::sample(&preset("phi3_1d").unwrap(), &l, 16).unwrap();
        let img = far_field(&mask, 1).unwrap();
        let cam = CameraSpec {
            pixels_per_mode: 1,
            window: 9,
            counts_total: 10,
        };
        assert!(matches!(bin_to_modes(&img, &cam), Err(Error::WindowExceedsImage { .. })));
    }

    #[test]
    fn cosine_far_field_matches_kernel() {
        let l = line(19);
        let mask = PhaseMask::sample_default(&preset("phi3_1d").unwrap(), &l).unwrap();
        let kernel = kernel_from_phase(&mask).unwrap().distribution().unwrap();
        let binned = bin_to_modes(&far_field(&mask, 5).unwrap(), &CameraSpec::default()).unwrap();
        assert!(binned.distribution.total_variation(&kernel).unwrap() < 1e-3);
        assert!(binned.leakage < 1e-12);
    }

    #[test]
    fn product_mask_far_field_2d() {
        let l = LatticeSpec::plane(19).unwrap();
        let mask = PhaseMask::sample(&preset("phi1_2d").unwrap(), &l, 96).unwrap();
        let kernel = kernel_from_phase_2d(&mask).unwrap().distribution().unwrap();
        let binned = bin_to_modes(&far_field(&mask, 5).unwrap(), &CameraSpec::default()).unwrap();
        assert!(binned.distribution.total_variation(&kernel).unwrap() < 1e-3);
    }

    #[test]
    fn similarity_examples() {
        let l = LatticeSpec::line(3).unwrap();
        let a = Distribution::new(l, vec![0.0, 0.5, 0.5]).unwrap();
        let b = Distribution::new(l, vec![0.0, 1.0, 0.0]).unwrap();
        let disjoint = Distribution::new(l, vec![1.0, 0.0, 0.0]).unwrap();
        assert!((similarity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(similarity(&b, &disjoint).unwrap(), 0.0);
        assert!((similarity(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        let other = Distribution::new(LatticeSpec::line(5).unwrap(), vec![0.2; 5]).unwrap();
        assert!(similarity(&a, &other).is_err());
    }

    #[test]
    fn poisson_deterministic_and_zero_counts() {
        let l = LatticeSpec::line(5).unwrap();
        let p = Distribution::new(l, vec![0.1, 0.2, 0.4, 0.2, 0.1]).unwrap();
        let a = sample_poisson(&p, 1000, 7).unwrap();
        let b = sample_poisson(&p, 1000, 7).unwrap();
        assert_eq!(a, b);
        let z = sample_poisson(&p, 0, 7).unwrap();
        assert!(z.counts.iter().all(|&n| n == 0));
        assert!(z.frequencies.is_none());
    }

    #[test]
    fn poisson_large_count_converges() {
        let l = LatticeSpec::line(5).unwrap();
        let p = Distribution::new(l, vec![0.1, 0.2, 0.4, 0.2, 0.1]).unwrap();
        let s = sample_poisson(&p, 100_000_000, 3).unwrap();
        assert!(s.frequencies.unwrap().total_variation(&p).unwrap() < 1e-3);
    }

    #[test]
    fn inverse_sinc_inverts() {
        for a in [0.05, 0.3, 0.5, 0.9, 0.999] {
            let t = inverse_sinc(a);
            assert!((-PI..=0.0).contains(&t));
            assert!((t.sin() / t - a).abs() < 1e-12);
        }
        assert_eq!(inverse_sinc(1.0), 0.0);
        assert_eq!(inverse_sinc(0.0), -PI);
    }

    #[test]
    fn uniform_bolduc_extracts_phase() {
        let l = line(19);
        let mask = PhaseMask::sample_default(&preset("phi3_1d").unwrap(), &l).unwrap();
        let mut spec = HologramSpec::phase_only(mask.clone());
        spec.encode = EncodeMode::Bolduc;
        spec.amplitude = Some(vec![1.0; mask.samples_per_period()]);
        let holo = synthesize_hologram(&spec).unwrap();
        assert_eq!(holo.carrier_cycles, 50);
        let extracted = extract_first_order(&holo, 0).unwrap();
        let target: Vec<Complex64> = mask.field().iter().copied().collect();
        assert!(field_fidelity(&extracted, &target) > 0.99);
        let mean_amp = extracted.iter().map(|c| c.norm()).sum::<f64>() / extracted.len() as f64;
        for c in &extracted {
            assert!((c.norm() - mean_amp).abs() < 1e-2);
        }
    }

    #[test]
    fn hologram_validation() {
        let l = line(19);
        let mask = PhaseMask::sample_default(&preset("phi3_1d").unwrap(), &l).unwrap();
        let mut spec = HologramSpec::phase_only(mask.clone());
        spec.encode = EncodeMode::Bolduc;
        spec.amplitude = Some(vec![1.2; mask.samples_per_period()]);
        assert!(matches!(synthesize_hologram(&spec), Err(Error::AmplitudeOutOfRange(_))));
        spec.amplitude = None;
        spec.blaze_period = l.period() / 5.0;
        assert!(synthesize_hologram(&spec).is_err());
    }

    #[test]
    fn phase_only_hologram_replicates() {
        let l = line(19);
        let mask = PhaseMask::sample(&preset("phi2_1d").unwrap(), &l, 80).unwrap();
        let holo = synthesize_hologram(&HologramSpec::phase_only(mask.clone())).unwrap();
        assert_eq!(holo.phase.dim(), (80, 80));
        assert_eq!(holo.phase.row(17), mask.total_phase().row(0));
        assert!(extract_first_order(&holo, 0).is_err());
    }

    #[test]
    fn heralded_window_shifts() {
        let l = LatticeSpec::line(5).unwrap();
        let d = Distribution::new(l, vec![0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let h = heralded_window(&d, MomentumIndex::new(1)).unwrap();
        assert_eq!(h.probability(MomentumIndex::new(-1)).unwrap(), 1.0);
    }

    #[test]
    fn kernel_field_roundtrip() {
        let l = line(19);
        let mask = PhaseMask::sample_default(&preset("phi2_1d").unwrap(), &l).unwrap();
        let k = kernel_from_phase(&mask).unwrap();
        let f = field_from_kernel(&k, mask.samples_per_period()).unwrap();
        for (a, b) in f.iter().zip(mask.field().iter()) {
            assert!((a - b).norm() < 1e-6);
        }
    }
}
