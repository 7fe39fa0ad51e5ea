//! Phase-mask descriptions and their sampled grids.
//!
//! A [`PhaseProfile`] is the analytic mask: a sum of sinusoidal gratings at
//! integer harmonics of the momentum quantum, optional `sin·cos` products
//! for 2D masks, and linear tilts. Tilts are kept apart from the sampled
//! grid because an integer tilt is exactly a whole-mode displacement.

use std::f64::consts::PI;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::parse;

pub const DEFAULT_SAMPLES_1D: usize = 256;
pub const DEFAULT_SAMPLES_2D: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    fn eval(self, t: f64) -> f64 {
        match self {
            Trig::Sin => t.sin(),
            Trig::Cos => t.cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub trig: Trig,
    #[serde(default = "one")]
    pub harmonic: i32,
}

fn one() -> i32 {
    1
}

/// One additive term of a mask, in units where `Δk·x` runs over `[0, 2π)` per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PhaseTerm {
    /// `amplitude · sin(harmonic · Δk · axis)`
    Sin {
        amplitude: f64,
        #[serde(default = "one")]
        harmonic: i32,
        #[serde(default)]
        axis: Axis,
    },
    /// `amplitude · cos(harmonic · Δk · axis)`
    Cos {
        amplitude: f64,
        #[serde(default = "one")]
        harmonic: i32,
        #[serde(default)]
        axis: Axis,
    },
    /// `slope · Δk · axis`; an integer slope displaces the spectrum by `slope` modes.
    Linear {
        slope: f64,
        #[serde(default)]
        axis: Axis,
    },
    /// `amplitude · f(Δk·x) · g(Δk·y)`
    Product { amplitude: f64, x: Factor, y: Factor },
}

impl PhaseTerm {
    pub fn sin(amplitude: f64, harmonic: i32) -> Self {
        PhaseTerm::Sin {
            amplitude,
            harmonic,
            axis: Axis::X,
        }
    }

    pub fn cos(amplitude: f64, harmonic: i32) -> Self {
        PhaseTerm::Cos {
            amplitude,
            harmonic,
            axis: Axis::X,
        }
    }

    fn uses_y(&self) -> bool {
        match self {
            PhaseTerm::Sin { axis, .. } | PhaseTerm::Cos { axis, .. } | PhaseTerm::Linear { axis, .. } => {
                *axis == Axis::Y
            }
            PhaseTerm::Product { .. } => true,
        }
    }

    fn values(&self) -> [f64; 2] {
        match *self {
            PhaseTerm::Sin { amplitude, .. } | PhaseTerm::Cos { amplitude, .. } => [amplitude, 0.0],
            PhaseTerm::Linear { slope, .. } => [slope, 0.0],
            PhaseTerm::Product { amplitude, .. } => [amplitude, 0.0],
        }
    }

    /// Periodic part at angles `tx = Δk·x`, `ty = Δk·y`.
    fn periodic(&self, tx: f64, ty: f64) -> f64 {
        let pick = |axis: Axis| if axis == Axis::X { tx } else { ty };
        match *self {
            PhaseTerm::Sin {
                amplitude,
                harmonic,
                axis,
            } => amplitude * (harmonic as f64 * pick(axis)).sin(),
            PhaseTerm::Cos {
                amplitude,
                harmonic,
                axis,
            } => amplitude * (harmonic as f64 * pick(axis)).cos(),
            PhaseTerm::Linear { .. } => 0.0,
            PhaseTerm::Product { amplitude, x, y } => {
                amplitude * x.trig.eval(x.harmonic as f64 * tx) * y.trig.eval(y.harmonic as f64 * ty)
            }
        }
    }
}

/// Analytic phase mask: axis count, period and terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub dims: usize,
    #[serde(default = "default_period")]
    pub period: f64,
    pub terms: Vec<PhaseTerm>,
}

fn default_period() -> f64 {
    crate::lattice::DEFAULT_PERIOD_MM
}

impl PhaseProfile {
    pub fn new(dims: usize, terms: Vec<PhaseTerm>) -> Result<Self> {
        let p = Self {
            dims,
            period: default_period(),
            terms,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims != 1 && self.dims != 2 {
            return Err(Error::InvalidConfig(format!("mask dims must be 1 or 2, got {}", self.dims)));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidConfig(format!("mask period {} must be positive", self.period)));
        }
        for t in &self.terms {
            if t.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("mask term"));
            }
            if self.dims == 1 && t.uses_y() {
                return Err(Error::InvalidConfig(format!("1D mask has a y-dependent term {t:?}")));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(src: &str) -> Result<Self> {
        let p: Self = parse::from_toml(src)?;
        p.validate()?;
        Ok(p)
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        let p: Self = parse::from_json(src)?;
        p.validate()?;
        Ok(p)
    }

    /// Loads a `.toml` or `.json` mask file.
    pub fn load(path: &Path) -> Result<Self> {
        let p: Self = parse::from_path(path)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("mask profiles serialize")
    }

    /// Periodic (non-linear) phase at angles `tx`, `ty`.
    pub fn periodic_phase(&self, tx: f64, ty: f64) -> f64 {
        self.terms.iter().map(|t| t.periodic(tx, ty)).sum()
    }

    /// Total linear slope per axis, in units of Δk.
    pub fn linear_slope(&self) -> [f64; 2] {
        let mut s = [0.0; 2];
        for t in &self.terms {
            if let PhaseTerm::Linear { slope, axis } = *t {
                s[axis as usize] += slope;
            }
        }
        s
    }
}

/// Named masks from the 1D and 2D lattice experiments.
pub fn preset(name: &str) -> Option<PhaseProfile> {
    use PhaseTerm as T;
    let sxy = |amp: f64| T::Product {
        amplitude: amp,
        x: Factor {
            trig: Trig::Sin,
            harmonic: 1,
        },
        y: Factor {
            trig: Trig::Cos,
            harmonic: 1,
        },
    };
    let (dims, terms) = match name {
        "phi1_1d" => (1, vec![T::sin(1.3, 1), T::cos(1.5, 2)]),
        "phi2_1d" => (1, vec![T::sin(1.9, 1)]),
        "phi3_1d" => (1, vec![T::cos(1.0, 1)]),
        "phi4_1d" => (
            1,
            vec![
                T::cos(1.0, 1),
                T::Linear {
                    slope: 1.0,
                    axis: Axis::X,
                },
            ],
        ),
        "phi1_2d" => (2, vec![sxy(2.8)]),
        "phi2_2d" => (2, separable_sines(1.4)),
        _ => return None,
    };
    Some(PhaseProfile {
        dims,
        period: default_period(),
        terms,
    })
}

pub const PRESET_NAMES: [&str; 6] = ["phi1_1d", "phi2_1d", "phi3_1d", "phi4_1d", "phi1_2d", "phi2_2d"];

/// `a·sin(Δk x) + a·sin(Δk y)`.
pub fn separable_sines(amplitude: f64) -> Vec<PhaseTerm> {
    vec![
        PhaseTerm::sin(amplitude, 1),
        PhaseTerm::Sin {
            amplitude,
            harmonic: 1,
            axis: Axis::Y,
        },
    ]
}

/// One period of a mask sampled on a regular grid.
///
/// The grid has shape `(1, S)` for 1D masks and `(S, S)` for 2D masks (rows
/// along `y`), sample `j` sitting at `x_j = jΛ/S`. Linear tilts are stored
/// separately as slopes in units of Δk.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    lattice: LatticeSpec,
    phase: Array2<f64>,
    linear: [f64; 2],
}

impl PhaseMask {
    pub fn sample(profile: &PhaseProfile, lattice: &LatticeSpec, samples_per_period: usize) -> Result<Self> {
        profile.validate()?;
        if profile.dims != lattice.dims() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dims(),
                actual: profile.dims,
            });
        }
        if samples_per_period == 0 {
            return Err(Error::InvalidConfig("samples per period must be positive".into()));
        }
        let s = samples_per_period;
        let rows = if lattice.dims() == 1 { 1 } else { s };
        let step = 2.0 * PI / s as f64;
        let phase = Array2::from_shape_fn((rows, s), |(r, c)| {
            profile.periodic_phase(c as f64 * step, r as f64 * step)
        });
        Ok(Self {
            lattice: *lattice,
            phase,
            linear: profile.linear_slope(),
        })
    }

    /// Samples with the default density for the lattice dimension.
    pub fn sample_default(profile: &PhaseProfile, lattice: &LatticeSpec) -> Result<Self> {
        let s = if lattice.dims() == 1 {
            DEFAULT_SAMPLES_1D
        } else {
            DEFAULT_SAMPLES_2D
        };
        Self::sample(profile, lattice, s)
    }

    /// Wraps an explicit phase grid covering one period per axis.
    pub fn from_grid(lattice: LatticeSpec, phase: Array2<f64>, linear: [f64; 2]) -> Result<Self> {
        let (rows, cols) = phase.dim();
        let ok = match lattice.dims() {
            1 => rows == 1 && cols > 0,
            _ => rows == cols && cols > 0,
        };
        if !ok {
            return Err(Error::GridMismatch(format!(
                "phase grid {rows}x{cols} does not cover one period of a {}D lattice",
                lattice.dims()
            )));
        }
        if phase.iter().chain(linear.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("phase grid"));
        }
        Ok(Self {
            lattice,
            phase,
            linear,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn dims(&self) -> usize {
        self.lattice.dims()
    }

    pub fn samples_per_period(&self) -> usize {
        self.phase.ncols()
    }

    /// Periodic part of the phase.
    pub fn phase(&self) -> &Array2<f64> {
        &self.phase
    }

    /// Linear slopes `[x, y]` in units of Δk.
    pub fn linear_slope(&self) -> [f64; 2] {
        self.linear
    }

    /// Total phase including the linear tilt, unwrapped.
    pub fn total_phase(&self) -> Array2<f64> {
        let s = self.samples_per_period() as f64;
        let [lx, ly] = self.linear;
        let mut out = self.phase.clone();
        let rows = out.nrows();
        for ((r, c), v) in out.indexed_iter_mut() {
            *v += 2.0 * PI * (lx * c as f64 + if rows > 1 { ly * r as f64 } else { 0.0 }) / s;
        }
        out
    }

    /// The transmitted field `e^{iφ}` over one period, tilt included.
    pub fn field(&self) -> Array2<Complex64> {
        self.total_phase().mapv(|p| Complex64::from_polar(1.0, p))
    }
}

/// Wraps a phase into `(-π, π]`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}
