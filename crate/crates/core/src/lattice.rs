//! Discrete momentum lattice and the single- and two-photon state containers.
//!
//! Modes are labelled by signed indices `-M..=M` per axis (`N = 2M + 1`, odd),
//! so the zero mode exists and negation closes on the index set. Storage is
//! flat: in 2D the flat index is `(y + M) * N + (x + M)`, matching a row-major
//! grid whose rows run along `y`.

use std::f64::consts::PI;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for claims that hold in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for quantities that pass through a DFT.
pub const FFT_TOL: f64 = 1e-9;

/// Default characteristic period: 1 mm / 7.
pub const DEFAULT_PERIOD_MM: f64 = 1.0 / 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct LatticeSpec {
    dims: usize,
    modes_per_axis: usize,
    period: f64,
}

#[derive(Serialize, Deserialize)]
struct RawLattice {
    dims: usize,
    modes: usize,
    #[serde(default = "default_period")]
    period: f64,
}

fn default_period() -> f64 {
    DEFAULT_PERIOD_MM
}

impl TryFrom<RawLattice> for LatticeSpec {
    type Error = Error;

    fn try_from(raw: RawLattice) -> Result<Self> {
        LatticeSpec::new(raw.dims, raw.modes, raw.period)
    }
}

impl From<LatticeSpec> for RawLattice {
    fn from(l: LatticeSpec) -> Self {
        RawLattice {
            dims: l.dims,
            modes: l.modes_per_axis,
            period: l.period,
        }
    }
}

impl LatticeSpec {
    pub fn new(dims: usize, modes_per_axis: usize, period: f64) -> Result<Self> {
        if dims != 1 && dims != 2 {
            return Err(Error::InvalidLattice(format!("dims must be 1 or 2, got {dims}")));
        }
        if modes_per_axis < 3 || modes_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "modes per axis must be odd and >= 3, got {modes_per_axis}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidLattice(format!("period must be positive, got {period}")));
        }
        Ok(Self {
            dims,
            modes_per_axis,
            period,
        })
    }

    /// 1D lattice with the default period.
    pub fn line(modes: usize) -> Result<Self> {
        Self::new(1, modes, DEFAULT_PERIOD_MM)
    }

    /// 2D lattice with the default period.
    pub fn plane(modes_per_axis: usize) -> Result<Self> {
        Self::new(2, modes_per_axis, DEFAULT_PERIOD_MM)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn modes_per_axis(&self) -> usize {
        self.modes_per_axis
    }

    /// `M` in `-M..=M`.
    pub fn half_width(&self) -> i32 {
        (self.modes_per_axis / 2) as i32
    }

    /// Characteristic spatial period Λ.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Momentum quantum Δk = 2π/Λ.
    pub fn delta_k(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Total mode count `N^dims`.
    pub fn mode_count(&self) -> usize {
        self.modes_per_axis.pow(self.dims as u32)
    }

    pub fn contains(&self, idx: MomentumIndex) -> bool {
        let m = self.half_width();
        let y_ok = if self.dims == 1 { idx.y == 0 } else { idx.y.abs() <= m };
        idx.x.abs() <= m && y_ok
    }

    pub fn check(&self, idx: MomentumIndex) -> Result<()> {
        if self.contains(idx) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                x: idx.x,
                y: idx.y,
                half_width: self.half_width(),
            })
        }
    }

    /// Flat storage offset of an in-range index.
    pub fn flat(&self, idx: MomentumIndex) -> Result<usize> {
        self.check(idx)?;
        Ok(self.flat_unchecked(idx))
    }

    pub(crate) fn flat_unchecked(&self, idx: MomentumIndex) -> usize {
        let m = self.half_width();
        let n = self.modes_per_axis;
        let x = (idx.x + m) as usize;
        if self.dims == 1 {
            x
        } else {
            (idx.y + m) as usize * n + x
        }
    }

    /// Inverse of [`LatticeSpec::flat`].
    pub fn index_at(&self, flat: usize) -> MomentumIndex {
        let m = self.half_width();
        let n = self.modes_per_axis;
        if self.dims == 1 {
            MomentumIndex::new(flat as i32 - m)
        } else {
            MomentumIndex::new_2d((flat % n) as i32 - m, (flat / n) as i32 - m)
        }
    }

    /// All indices in flat storage order.
    pub fn indices(&self) -> impl Iterator<Item = MomentumIndex> + '_ {
        (0..self.mode_count()).map(move |f| self.index_at(f))
    }

    /// Wraps an arbitrary integer onto `-M..=M` modulo `N`.
    pub fn wrap(&self, m: i32) -> i32 {
        let n = self.modes_per_axis as i32;
        let h = self.half_width();
        (m + h).rem_euclid(n) - h
    }

    pub fn wrap_index(&self, idx: MomentumIndex) -> MomentumIndex {
        if self.dims == 1 {
            MomentumIndex::new(self.wrap(idx.x))
        } else {
            MomentumIndex::new_2d(self.wrap(idx.x), self.wrap(idx.y))
        }
    }

    /// Flat offset of `-index_at(flat)`.
    pub fn negated_flat(&self, flat: usize) -> usize {
        self.flat_unchecked(self.index_at(flat).negated())
    }

    /// Same geometry with a different mode count per axis.
    pub fn with_modes(&self, modes_per_axis: usize) -> Result<Self> {
        Self::new(self.dims, modes_per_axis, self.period)
    }

    pub fn ensure_same(&self, other: &LatticeSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LatticeMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}D lattice, {} modes/axis, period {}",
            self.dims, self.modes_per_axis, self.period
        )
    }
}

/// Signed mode label. For 1D lattices `y` is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MomentumIndex {
    pub x: i32,
    pub y: i32,
}

impl MomentumIndex {
    pub const ZERO: MomentumIndex = MomentumIndex { x: 0, y: 0 };

    pub fn new(m: i32) -> Self {
        Self { x: m, y: 0 }
    }

    pub fn new_2d(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn negated(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
        }
    }
}

impl std::ops::Add for MomentumIndex {
    type Output = MomentumIndex;

    fn add(self, rhs: Self) -> Self {
        MomentumIndex::new_2d(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for MomentumIndex {
    type Output = MomentumIndex;

    fn sub(self, rhs: Self) -> Self {
        MomentumIndex::new_2d(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for MomentumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Component-wise negation `m -> -m`, checked against the lattice bounds.
pub fn negate_index(idx: MomentumIndex, lattice: &LatticeSpec) -> Result<MomentumIndex> {
    lattice.check(idx)?;
    Ok(idx.negated())
}

/// Normalized single-photon state over the lattice modes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    lattice: LatticeSpec,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(lattice: LatticeSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != lattice.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: lattice.mode_count(),
                actual: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let mut state = Self {
            lattice,
            amplitudes,
        };
        state.normalize()?;
        Ok(state)
    }

    /// The basis state `|idx>`.
    pub fn basis(lattice: LatticeSpec, idx: MomentumIndex) -> Result<Self> {
        let flat = lattice.flat(idx)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); lattice.mode_count()];
        amplitudes[flat] = Complex64::new(1.0, 0.0);
        Ok(Self {
            lattice,
            amplitudes,
        })
    }

    /// Superposition of a few modes, e.g. `(|0> + i|1>)/√2`. Repeated indices add up.
    pub fn from_sparse(lattice: LatticeSpec, terms: &[(MomentumIndex, Complex64)]) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); lattice.mode_count()];
        for &(idx, c) in terms {
            amplitudes[lattice.flat(idx)?] += c;
        }
        Self::new(lattice, amplitudes)
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(())
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, idx: MomentumIndex) -> Result<Complex64> {
        Ok(self.amplitudes[self.lattice.flat(idx)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.lattice.ensure_same(&other.lattice)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = Complex64::from_polar(1.0, theta);
        Self {
            lattice: self.lattice,
            amplitudes: self.amplitudes.iter().map(|a| a * ph).collect(),
        }
    }

    /// Relabels `|m> -> |-m>`.
    pub fn negated_indices(&self) -> Self {
        let amplitudes = (0..self.amplitudes.len())
            .map(|f| self.amplitudes[self.lattice.negated_flat(f)])
            .collect();
        Self {
            lattice: self.lattice,
            amplitudes,
        }
    }

    /// Circular shift `|m> -> |m + by>`.
    pub fn shifted(&self, by: MomentumIndex) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (f, a) in self.amplitudes.iter().enumerate() {
            let target = self.lattice.wrap_index(self.lattice.index_at(f) + by);
            amplitudes[self.lattice.flat_unchecked(target)] = *a;
        }
        Self {
            lattice: self.lattice,
            amplitudes,
        }
    }
}

/// `|<a|b>|^2`, clamped to `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr() / (a.norm_sqr() * b.norm_sqr());
    Ok(overlap.clamp(0.0, 1.0))
}

/// Probability law `P(m) = |amplitude(m)|^2`.
pub fn distribution_of(state: &StateVector) -> Distribution {
    let weights = state.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    Distribution::from_weights(state.lattice, weights).expect("normalized state has positive weight")
}

/// Normalized probabilities over the lattice modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    lattice: LatticeSpec,
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Accepts probabilities that already sum to one within [`FFT_TOL`].
    pub fn new(lattice: LatticeSpec, probabilities: Vec<f64>) -> Result<Self> {
        let sum = Self::validate(&lattice, &probabilities)?;
        if (sum - 1.0).abs() > FFT_TOL {
            return Err(Error::InvalidConfig(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            lattice,
            probabilities,
        })
    }

    /// Renormalizes arbitrary non-negative weights.
    pub fn from_weights(lattice: LatticeSpec, weights: Vec<f64>) -> Result<Self> {
        let sum = Self::validate(&lattice, &weights)?;
        if sum <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            lattice,
            probabilities: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    fn validate(lattice: &LatticeSpec, p: &[f64]) -> Result<f64> {
        if p.len() != lattice.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: lattice.mode_count(),
                actual: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("distribution"));
        }
        if let Some(neg) = p.iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidConfig(format!("negative probability {neg}")));
        }
        Ok(p.iter().sum())
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, idx: MomentumIndex) -> Result<f64> {
        Ok(self.probabilities[self.lattice.flat(idx)?])
    }

    /// Restricts to the window `|m| <= half_width` per axis and renormalizes
    /// over it. Modes of the window outside this lattice get zero. Returns
    /// the out-of-window mass alongside.
    pub fn on_window(&self, half_width: usize) -> Result<(Distribution, f64)> {
        let window = self.lattice.with_modes(2 * half_width + 1)?;
        let weights: Vec<f64> = window
            .indices()
            .map(|idx| {
                if self.lattice.contains(idx) {
                    self.probabilities[self.lattice.flat_unchecked(idx)]
                } else {
                    0.0
                }
            })
            .collect();
        let inside: f64 = weights.iter().sum();
        let leakage = (1.0 - inside).max(0.0);
        Ok((Distribution::from_weights(window, weights)?, leakage))
    }

    /// Number of modes with probability strictly above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.probabilities.iter().filter(|&&p| p > threshold).count()
    }

    /// Half the L1 distance.
    pub fn total_variation(&self, other: &Distribution) -> Result<f64> {
        self.lattice.ensure_same(&other.lattice)?;
        Ok(0.5
            * self
                .probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// Adds `eps` to the zero mode and renormalizes (zeroth-order contamination).
    pub fn with_zeroth_order_leakage(&self, eps: f64) -> Result<Distribution> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidConfig(format!("zeroth-order leakage {eps} must be >= 0")));
        }
        let mut weights = self.probabilities.clone();
        weights[self.lattice.flat_unchecked(MomentumIndex::ZERO)] += eps;
        Distribution::from_weights(self.lattice, weights)
    }
}

/// Two-photon amplitudes indexed `(signal mode, idler mode)` in flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonState {
    lattice: LatticeSpec,
    amplitudes: Array2<Complex64>,
}

impl BiphotonState {
    /// Accepts a `(N^dims) x (N^dims)` amplitude tensor whose squared norm is 1 within [`FFT_TOL`].
    pub fn new(lattice: LatticeSpec, amplitudes: Array2<Complex64>) -> Result<Self> {
        let n = lattice.mode_count();
        if amplitudes.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() {
            return Err(Error::NonFinite("biphoton amplitudes"));
        }
        if (norm - 1.0).abs() > FFT_TOL {
            return Err(Error::InvalidConfig(format!(
                "biphoton squared norm {norm} differs from 1"
            )));
        }
        Ok(Self {
            lattice,
            amplitudes,
        })
    }

    pub(crate) fn from_parts_unchecked(lattice: LatticeSpec, amplitudes: Array2<Complex64>) -> Self {
        Self {
            lattice,
            amplitudes,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// Rows are signal modes, columns idler modes.
    pub fn amplitudes(&self) -> &Array2<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, signal: MomentumIndex, idler: MomentumIndex) -> Result<Complex64> {
        Ok(self.amplitudes[[self.lattice.flat(signal)?, self.lattice.flat(idler)?]])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest element-wise amplitude difference.
    pub fn max_abs_diff(&self, other: &BiphotonState) -> Result<f64> {
        self.lattice.ensure_same(&other.lattice)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Reduced distribution of the signal photon.
    pub fn signal_marginal(&self) -> Distribution {
        let w = self
            .amplitudes
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        Distribution::from_weights(self.lattice, w).expect("normalized biphoton state")
    }

    /// Reduced distribution of the idler photon.
    pub fn idler_marginal(&self) -> Distribution {
        let w = self
            .amplitudes
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        Distribution::from_weights(self.lattice, w).expect("normalized biphoton state")
    }
}

/// The momentum-anticorrelated pair `Σ_k |k>_s |-k>_i / √(N^dims)`.
pub fn make_correlated_state(lattice: &LatticeSpec) -> BiphotonState {
    let n = lattice.mode_count();
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amplitudes = Array2::zeros((n, n));
    for k in 0..n {
        amplitudes[[k, lattice.negated_flat(k)]] = amp;
    }
    BiphotonState::from_parts_unchecked(*lattice, amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lattice_rejects_even_and_small() {
        assert!(LatticeSpec::line(2).is_err());
        assert!(LatticeSpec::line(1).is_err());
        assert!(LatticeSpec::line(4).is_err());
        assert!(LatticeSpec::new(3, 5, 1.0).is_err());
        assert!(LatticeSpec::new(1, 5, 0.0).is_err());
        assert!(LatticeSpec::line(3).is_ok());
    }

    #[test]
    fn delta_k_matches_period() {
        let l = LatticeSpec::new(1, 7, 1.0 / 7.0).unwrap();
        assert_eq!(l.delta_k(), 2.0 * PI / (1.0 / 7.0));
    }

    #[test]
    fn flat_roundtrip_2d() {
        let l = LatticeSpec::plane(5).unwrap();
        for f in 0..l.mode_count() {
            assert_eq!(l.flat(l.index_at(f)).unwrap(), f);
        }
        assert_eq!(l.flat(MomentumIndex::new_2d(-2, -2)).unwrap(), 0);
        assert_eq!(l.flat(MomentumIndex::new_2d(1, 0)).unwrap(), 2 * 5 + 3);
    }

    #[test]
    fn negate_examples() {
        let l7 = LatticeSpec::line(7).unwrap();
        assert_eq!(negate_index(MomentumIndex::new(2), &l7).unwrap(), MomentumIndex::new(-2));
        assert_eq!(negate_index(MomentumIndex::ZERO, &l7).unwrap(), MomentumIndex::ZERO);
        let p7 = LatticeSpec::plane(7).unwrap();
        assert_eq!(
            negate_index(MomentumIndex::new_2d(1, -3), &p7).unwrap(),
            MomentumIndex::new_2d(-1, 3)
        );
        assert!(matches!(
            negate_index(MomentumIndex::new(4), &l7),
            Err(Error::IndexOutOfRange { .. })
        ));
        // 1D lattices carry no y component
        assert!(negate_index(MomentumIndex::new_2d(0, 1), &l7).is_err());
    }

    #[test]
    fn wrap_is_modular() {
        let l = LatticeSpec::line(7).unwrap();
        assert_eq!(l.wrap(4), -3);
        assert_eq!(l.wrap(-4), 3);
        assert_eq!(l.wrap(10), 3);
        assert_eq!(l.wrap(0), 0);
    }

    #[test]
    fn correlated_state_n3() {
        let l = LatticeSpec::line(3).unwrap();
        let psi = make_correlated_state(&l);
        let a = 1.0 / 3f64.sqrt();
        for s in -1..=1 {
            for i in -1..=1 {
                let got = psi.amplitude(MomentumIndex::new(s), MomentumIndex::new(i)).unwrap();
                let want = if i == -s { a } else { 0.0 };
                assert_eq!(got, c(want, 0.0), "({s},{i})");
            }
        }
        assert!((psi.norm_sqr() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn correlated_state_n3_2d() {
        let l = LatticeSpec::plane(3).unwrap();
        let psi = make_correlated_state(&l);
        let nonzero: Vec<_> = psi.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 9);
        for a in nonzero {
            assert!((a.norm() - 1.0 / 3.0).abs() < EXACT_TOL);
        }
        assert!((psi.norm_sqr() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn correlated_marginals_uniform() {
        for l in [LatticeSpec::line(9).unwrap(), LatticeSpec::plane(5).unwrap()] {
            let psi = make_correlated_state(&l);
            let n = l.mode_count() as f64;
            for d in [psi.signal_marginal(), psi.idler_marginal()] {
                for p in d.probabilities() {
                    assert!((p - 1.0 / n).abs() < EXACT_TOL);
                }
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let l = LatticeSpec::line(3).unwrap();
        let e0 = StateVector::basis(l, MomentumIndex::new(0)).unwrap();
        let e1 = StateVector::basis(l, MomentumIndex::new(1)).unwrap();
        assert_eq!(fidelity(&e0, &e0).unwrap(), 1.0);
        assert_eq!(fidelity(&e0, &e1).unwrap(), 0.0);
        let plus = StateVector::from_sparse(
            l,
            &[(MomentumIndex::new(0), c(1.0, 0.0)), (MomentumIndex::new(1), c(1.0, 0.0))],
        )
        .unwrap();
        assert!((fidelity(&e0, &plus).unwrap() - 0.5).abs() < EXACT_TOL);
    }

    #[test]
    fn fidelity_lattice_mismatch() {
        let a = StateVector::basis(LatticeSpec::line(3).unwrap(), MomentumIndex::ZERO).unwrap();
        let b = StateVector::basis(LatticeSpec::line(5).unwrap(), MomentumIndex::ZERO).unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::LatticeMismatch(_))));
    }

    #[test]
    fn distribution_examples() {
        let l = LatticeSpec::line(3).unwrap();
        let d = distribution_of(&StateVector::basis(l, MomentumIndex::new(-1)).unwrap());
        assert_eq!(d.probabilities(), &[1.0, 0.0, 0.0]);
        let s = StateVector::from_sparse(
            l,
            &[(MomentumIndex::new(0), c(1.0, 0.0)), (MomentumIndex::new(1), c(0.0, 1.0))],
        )
        .unwrap();
        let d = distribution_of(&s);
        assert!((d.probability(MomentumIndex::new(0)).unwrap() - 0.5).abs() < EXACT_TOL);
        assert!((d.probability(MomentumIndex::new(1)).unwrap() - 0.5).abs() < EXACT_TOL);
    }

    #[test]
    fn zero_state_rejected() {
        let l = LatticeSpec::line(3).unwrap();
        assert!(matches!(
            StateVector::new(l, vec![c(0.0, 0.0); 3]),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn window_pads_and_reports_leakage() {
        let l = LatticeSpec::line(5).unwrap();
        let d = Distribution::new(l, vec![0.1, 0.2, 0.4, 0.2, 0.1]).unwrap();
        let (w, leak) = d.on_window(1).unwrap();
        assert!((leak - 0.2).abs() < EXACT_TOL);
        assert!((w.probabilities()[1] - 0.5).abs() < EXACT_TOL);
        let (wide, leak) = d.on_window(4).unwrap();
        assert_eq!(wide.probabilities().len(), 9);
        assert_eq!(leak, 0.0);
        assert_eq!(wide.probabilities()[0], 0.0);
    }

    #[test]
    fn zeroth_order_leakage_renormalizes() {
        let l = LatticeSpec::line(3).unwrap();
        let d = Distribution::new(l, vec![0.5, 0.0, 0.5]).unwrap();
        let e = d.with_zeroth_order_leakage(1.0).unwrap();
        assert_eq!(e.probabilities(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn shift_and_negate_states() {
        let l = LatticeSpec::line(5).unwrap();
        let s = StateVector::basis(l, MomentumIndex::new(2)).unwrap();
        let shifted = s.shifted(MomentumIndex::new(1));
        assert_eq!(shifted.amplitude(MomentumIndex::new(-2)).unwrap(), c(1.0, 0.0));
        let neg = s.negated_indices();
        assert_eq!(neg.amplitude(MomentumIndex::new(-2)).unwrap(), c(1.0, 0.0));
    }
}
