//! Scenario files: one TOML (or JSON) document per run.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qtransfer_core::mask::{preset, PhaseTerm};
use qtransfer_core::optics::{CameraSpec, EncodeMode};
use qtransfer_core::retrieval::GsConfig;
use qtransfer_core::{parse, Error, LatticeSpec, MomentumIndex, PhaseProfile, StateVector};
use serde::{Deserialize, Serialize};

/// Largest kernel leakage a scenario may run with.
pub const MAX_LEAKAGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub lattice: LatticeSpec,
    pub unitary: UnitarySource,
    /// Input coefficients `d_ℓ`; omitted means the localized mode `k0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<ModeAmplitude>>,
    #[serde(default)]
    pub projection: ProjectionSpec,
    #[serde(default)]
    pub camera: CameraSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub encoding: EncodeMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval: Option<GsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum UnitarySource {
    /// Phase mask, from a named preset or explicit terms.
    Mask {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        terms: Option<Vec<PhaseTerm>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    /// Haar-random dense unitary.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    pub m: i32,
    #[serde(default)]
    pub m_y: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionSpec {
    pub k0: i32,
    pub k0_y: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub seed: u64,
    /// Zeroth-order contamination ε added before sampling.
    pub zeroth_order: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            zeroth_order: 0.0,
        }
    }
}

impl Scenario {
    pub fn from_toml_str(src: &str) -> Result<Self, Error> {
        let s: Scenario = parse::from_toml(src)?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_json_str(src: &str) -> Result<Self, Error> {
        let s: Scenario = parse::from_json(src)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let s: Scenario = parse::from_path(path)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenarios serialize")
    }

    pub fn validate(&self) -> Result<(), Error> {
        let l = &self.lattice;
        if self.name.trim().is_empty() {
            return Err(Error::InvalidConfig("scenario name is empty".into()));
        }
        if self.camera.window > l.half_width() as usize {
            return Err(Error::InvalidConfig(format!(
                "camera window {} exceeds lattice half-width {}",
                self.camera.window,
                l.half_width()
            )));
        }
        if self.camera.pixels_per_mode == 0 {
            return Err(Error::InvalidConfig("pixels_per_mode must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.noise.zeroth_order) {
            return Err(Error::InvalidConfig("zeroth_order must lie in [0, 1)".into()));
        }
        if let UnitarySource::Mask { preset: p, terms, .. } = &self.unitary {
            match (p, terms) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(Error::InvalidConfig("mask needs exactly one of `preset` or `terms`".into()))
                }
                _ => {}
            }
            let profile = self.profile()?.expect("mask source");
            if profile.dims != l.dims() {
                return Err(Error::InvalidConfig(format!(
                    "mask is {}D, lattice is {}D",
                    profile.dims,
                    l.dims()
                )));
            }
        }
        if self.encoding == EncodeMode::Bolduc && l.dims() != 1 {
            return Err(Error::InvalidConfig("Bolduc encoding is 1D only".into()));
        }
        self.projection_index()?;
        self.input_state()?;
        if let Some(gs) = &self.retrieval {
            gs.validate()?;
        }
        Ok(())
    }

    /// Mask profile, `None` for dense random unitaries.
    pub fn profile(&self) -> Result<Option<PhaseProfile>, Error> {
        match &self.unitary {
            UnitarySource::Mask {
                preset: Some(name), ..
            } => preset(name)
                .map(Some)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown preset `{name}`"))),
            UnitarySource::Mask { terms: Some(t), .. } => {
                let mut p = PhaseProfile::new(self.lattice.dims(), t.clone())?;
                p.period = self.lattice.period();
                Ok(Some(p))
            }
            UnitarySource::Mask { .. } => Err(Error::InvalidConfig("mask has no terms".into())),
            UnitarySource::Random { .. } => Ok(None),
        }
    }

    pub fn projection_index(&self) -> Result<MomentumIndex, Error> {
        let idx = if self.lattice.dims() == 1 {
            if self.projection.k0_y != 0 {
                return Err(Error::InvalidConfig("k0_y set on a 1D lattice".into()));
            }
            MomentumIndex::new(self.projection.k0)
        } else {
            MomentumIndex::new_2d(self.projection.k0, self.projection.k0_y)
        };
        self.lattice.check(idx)?;
        Ok(idx)
    }

    /// Normalized input `φ₀`.
    pub fn input_state(&self) -> Result<StateVector, Error> {
        match &self.input {
            None => StateVector::basis(self.lattice, self.projection_index()?),
            Some(terms) => {
                let mut sparse = Vec::with_capacity(terms.len());
                for t in terms {
                    if self.lattice.dims() == 1 && t.m_y != 0 {
                        return Err(Error::InvalidConfig("m_y set on a 1D lattice".into()));
                    }
                    let idx = if self.lattice.dims() == 1 {
                        MomentumIndex::new(t.m)
                    } else {
                        MomentumIndex::new_2d(t.m, t.m_y)
                    };
                    sparse.push((idx, Complex64::new(t.re, t.im)));
                }
                StateVector::from_sparse(self.lattice, &sparse)
            }
        }
    }

    /// Replaces every seed (unitary, noise, retrieval) with `seed`.
    pub fn override_seeds(&mut self, seed: u64) {
        if let UnitarySource::Random { seed: s } = &mut self.unitary {
            *s = seed;
        }
        self.noise.seed = seed;
        if let Some(gs) = &mut self.retrieval {
            gs.seed = seed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "phi2"
lattice = { dims = 1, modes = 61 }
unitary = { kind = "mask", preset = "phi2_1d" }
"#;

    #[test]
    fn minimal_scenario_defaults() {
        let s = Scenario::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.camera, CameraSpec::default());
        assert_eq!(s.projection_index().unwrap(), MomentumIndex::ZERO);
        assert!(s.retrieval.is_none());
        let again = Scenario::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn window_must_fit_lattice() {
        let src = MINIMAL.replace("modes = 61", "modes = 11");
        assert!(matches!(Scenario::from_toml_str(&src), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn unknown_key_is_parse_error_with_line() {
        let src = format!("{MINIMAL}bogus = 3\n");
        match Scenario::from_toml_str(&src) {
            Err(Error::Parse { line, .. }) => assert!(line >= 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_terms_and_input() {
        let src = r#"
name = "custom"
lattice = { dims = 1, modes = 31 }
input = [{ m = 0, re = 1.0 }, { m = 1, re = 0.0, im = 1.0 }]

[unitary]
kind = "mask"
terms = [{ kind = "cos", amplitude = 1.0 }]
"#;
        let s = Scenario::from_toml_str(src).unwrap();
        let d = s.input_state().unwrap();
        assert!((d.amplitude(MomentumIndex::new(1)).unwrap().im - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn seed_override_reaches_every_seed() {
        let src = r#"
name = "r"
lattice = { dims = 1, modes = 21 }
unitary = { kind = "random", seed = 4 }
retrieval = { n_runs = 2, n_iters = 3, seed = 9 }
"#;
        let mut s = Scenario::from_toml_str(src).unwrap();
        s.override_seeds(77);
        assert_eq!(s.unitary, UnitarySource::Random { seed: 77 });
        assert_eq!(s.noise.seed, 77);
        assert_eq!(s.retrieval.unwrap().seed, 77);
    }
}
