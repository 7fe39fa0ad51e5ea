//! Shared fixtures for the criterion benches in `benches/`.

use qtransfer_core::mask::preset;
use qtransfer_core::{LatticeSpec, PhaseMask};

/// Preset mask sampled at its default density on an `n`-mode lattice.
pub fn preset_mask(name: &str, modes: usize) -> PhaseMask {
    let profile = preset(name).unwrap_or_else(|| panic!("unknown preset {name}"));
    let lattice = if profile.dims == 1 {
        LatticeSpec::line(modes)
    } else {
        LatticeSpec::plane(modes)
    }
    .expect("odd mode count");
    PhaseMask::sample_default(&profile, &lattice).expect("mask samples")
}
