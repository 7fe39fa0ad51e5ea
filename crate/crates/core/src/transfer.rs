//! Nonlocal transfer: act on the signal photon of a correlated pair, project
//! it, and read the requested output `U|φ₀>` off the idler photon.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    fidelity, make_correlated_state, BiphotonState, LatticeSpec, MomentumIndex, StateVector, EXACT_TOL,
};
use crate::unitary::{circulant_matrix, construct_transfer_unitary, ConvolutionKernel, UnitaryOperator};

/// Below this heralding probability the projection is treated as a failure.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-15;

/// Signal projection `|χ> = Σ A(k') |k'>`, normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionVector {
    lattice: LatticeSpec,
    coefficients: Vec<Complex64>,
}

impl ProjectionVector {
    pub fn new(lattice: LatticeSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        let s = StateVector::new(lattice, coefficients)?;
        Ok(Self {
            lattice,
            coefficients: s.amplitudes().to_vec(),
        })
    }

    pub fn basis(lattice: LatticeSpec, k0: MomentumIndex) -> Result<Self> {
        let s = StateVector::basis(lattice, k0)?;
        Ok(Self {
            lattice,
            coefficients: s.amplitudes().to_vec(),
        })
    }

    /// `A(k') = C(k')*` for the requested input `Σ C(k') |k'>`.
    pub fn for_input(input: &StateVector) -> Self {
        Self {
            lattice: *input.lattice(),
            coefficients: input.amplitudes().iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
}

/// Idler amplitudes after a heralding projection on the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Unnormalized idler amplitudes.
    pub idler_amplitudes: Vec<Complex64>,
    pub success_probability: f64,
    pub idler_state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub idler_state: StateVector,
    pub success_probability: f64,
    /// `|<idler| U φ₀>|^2`.
    pub fidelity_vs_direct: f64,
}

/// How idler modes are labelled in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdlerConvention {
    /// Idler's own momentum, `Σ u_m |k_m - k₀>`.
    #[default]
    Direct,
    /// Labelled by the signal partner mode, i.e. `|m> -> |-m>`.
    Partner,
}

impl IdlerConvention {
    pub fn relabel(self, state: &StateVector) -> StateVector {
        match self {
            IdlerConvention::Direct => state.clone(),
            IdlerConvention::Partner => state.negated_indices(),
        }
    }
}

/// `(U'_s ⊗ I)|ψ>`: amplitude `(k', j) = Σ_k U'(k', k) ψ(k, j)`.
pub fn apply_signal_unitary(psi: &BiphotonState, us: &UnitaryOperator) -> Result<BiphotonState> {
    psi.lattice().ensure_same(us.lattice())?;
    let out = us.matrix().dot(psi.amplitudes());
    Ok(BiphotonState::from_parts_unchecked(*psi.lattice(), out))
}

/// Contracts the signal index with `A*(k')`.
pub fn project_signal(psi: &BiphotonState, chi: &ProjectionVector) -> Result<Projection> {
    psi.lattice().ensure_same(chi.lattice())?;
    contract(*psi.lattice(), psi.amplitudes(), chi.coefficients())
}

fn contract(lattice: LatticeSpec, amps: &Array2<Complex64>, chi: &[Complex64]) -> Result<Projection> {
    let idler: Vec<Complex64> = amps
        .columns()
        .into_iter()
        .map(|col| col.iter().zip(chi).map(|(a, c)| c.conj() * a).sum())
        .collect();
    let p: f64 = idler.iter().map(|a| a.norm_sqr()).sum();
    if !(p >= MIN_SUCCESS_PROBABILITY) {
        return Err(Error::ProjectionAnnihilates(p));
    }
    let idler_state = StateVector::new(lattice, idler.clone())?;
    Ok(Projection {
        idler_amplitudes: idler,
        success_probability: p,
        idler_state,
    })
}

/// Transfers `U|k₀>`: apply `U'_s`, project the signal on `|k₀>`.
pub fn transfer_localized(u: &UnitaryOperator, k0: MomentumIndex) -> Result<TransferResult> {
    let input = StateVector::basis(*u.lattice(), k0)?;
    transfer_general(u, &input)
}

/// Transfers `U|φ₀>` for an arbitrary input: apply `U'_s`, project on `A = C*`.
pub fn transfer_general(u: &UnitaryOperator, phi0: &StateVector) -> Result<TransferResult> {
    u.lattice().ensure_same(phi0.lattice())?;
    let psi = make_correlated_state(u.lattice());
    let us = construct_transfer_unitary(u);
    let steered = apply_signal_unitary(&psi, &us)?;
    let proj = project_signal(&steered, &ProjectionVector::for_input(phi0))?;
    let direct = u.apply(phi0)?;
    let fid = fidelity(&proj.idler_state, &direct)?;
    Ok(TransferResult {
        idler_state: proj.idler_state,
        success_probability: proj.success_probability,
        fidelity_vs_direct: fid,
    })
}

/// Kernel that steers the idler into `U|ψ₀>` for a translation-invariant `U`
/// and input `Σ d_ℓ |ℓ>`: the circular convolution `v_m = Σ_ℓ d_ℓ u_{m-ℓ}`.
///
/// `v` is generally not a phase-only kernel, but for normalized `d` and
/// unitary `u` it has unit norm; the returned copy is renormalized.
pub fn transfer_kernel_route(u: &ConvolutionKernel, d: &StateVector) -> Result<ConvolutionKernel> {
    u.lattice().ensure_same(d.lattice())?;
    let l = *u.lattice();
    let mut v = vec![Complex64::new(0.0, 0.0); l.mode_count()];
    for (fl, dl) in d.amplitudes().iter().enumerate() {
        if dl.norm_sqr() == 0.0 {
            continue;
        }
        let ell = l.index_at(fl);
        for (fn_, un) in u.coefficients().iter().enumerate() {
            let m = l.wrap_index(l.index_at(fn_) + ell);
            v[l.flat(m)?] += dl * un;
        }
    }
    ConvolutionKernel::from_raw(l, v)?.renormalized()
}

/// Drives the signal with the (generally non-unitary) circulant of `v`,
/// projects it on `|k₀>`, and returns the heralded idler `Σ_m v_m |m - k₀>`.
pub fn project_after_kernel(v: &ConvolutionKernel, k0: MomentumIndex) -> Result<Projection> {
    let l = *v.lattice();
    let psi = make_correlated_state(&l);
    let driven = circulant_matrix(v).dot(psi.amplitudes());
    let chi = ProjectionVector::basis(l, k0)?;
    contract(l, &driven, chi.coefficients())
}

/// Prepares `Σ_k |k>|-k>` with the d-dimensional circuit: Hadamard (DFT) on
/// register 1, controlled shift `|j>|k> -> |j>|j+k mod d>`, then the
/// anti-identity on register 2. Register value `r` labels mode `r` wrapped
/// onto `-M..=M`.
pub fn prepare_correlated_state_via_circuit(lattice: &LatticeSpec) -> Result<BiphotonState> {
    if lattice.dims() != 1 {
        return Err(Error::InvalidLattice(
            "circuit preparation is defined on 1D lattices".into(),
        ));
    }
    let d = lattice.modes_per_axis();
    let mut reg = Array2::<Complex64>::zeros((d, d));
    reg[[0, 0]] = Complex64::new(1.0, 0.0);

    let hadamard = Array2::from_shape_fn((d, d), |(j, k)| {
        Complex64::from_polar(1.0 / (d as f64).sqrt(), 2.0 * PI * (j * k) as f64 / d as f64)
    });
    reg = hadamard.dot(&reg);

    let mut cx = Array2::<Complex64>::zeros((d, d));
    for j in 0..d {
        for k in 0..d {
            cx[[j, (j + k) % d]] = reg[[j, k]];
        }
    }

    let mut anti = Array2::<Complex64>::zeros((d, d));
    for j in 0..d {
        for k in 0..d {
            anti[[j, (d - k) % d]] = cx[[j, k]];
        }
    }

    let n = lattice.mode_count();
    let mut amps = Array2::<Complex64>::zeros((n, n));
    for r1 in 0..d {
        for r2 in 0..d {
            let s = lattice.flat(MomentumIndex::new(lattice.wrap(r1 as i32)))?;
            let i = lattice.flat(MomentumIndex::new(lattice.wrap(r2 as i32)))?;
            amps[[s, i]] = anti[[r1, r2]];
        }
    }
    let prepared = BiphotonState::new(*lattice, amps)?;
    let dev = prepared.max_abs_diff(&make_correlated_state(lattice))?;
    if dev > EXACT_TOL {
        return Err(Error::CircuitMismatch(dev));
    }
    Ok(prepared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::distribution_of;
    use crate::unitary::random_unitary;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_signal_unitary_is_noop() {
        let l = LatticeSpec::line(5).unwrap();
        let psi = make_correlated_state(&l);
        let out = apply_signal_unitary(&psi, &UnitaryOperator::identity(l)).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn anti_identity_moves_to_diagonal() {
        let l = LatticeSpec::line(5).unwrap();
        let psi = make_correlated_state(&l);
        let out = apply_signal_unitary(&psi, &UnitaryOperator::anti_identity(l)).unwrap();
        let a = 1.0 / 5f64.sqrt();
        for s in l.indices() {
            for i in l.indices() {
                let want = if s == i { a } else { 0.0 };
                assert!((out.amplitude(s, i).unwrap() - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn signal_unitary_preserves_norm() {
        let l = LatticeSpec::line(9).unwrap();
        let out = apply_signal_unitary(&make_correlated_state(&l), &random_unitary(&l, 3)).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bare_projection_heralds_negated_mode() {
        let l = LatticeSpec::line(7).unwrap();
        let k0 = MomentumIndex::new(2);
        let proj = project_signal(&make_correlated_state(&l), &ProjectionVector::basis(l, k0).unwrap()).unwrap();
        assert!((proj.success_probability - 1.0 / 7.0).abs() < EXACT_TOL);
        assert!((proj.idler_state.amplitude(k0.negated()).unwrap().norm() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn orthogonal_projection_errors() {
        let l = LatticeSpec::line(5).unwrap();
        // signal support restricted to one mode, projector on another
        let mut amps = Array2::zeros((5, 5));
        amps[[0, 4]] = c(1.0, 0.0);
        let psi = BiphotonState::new(l, amps).unwrap();
        let chi = ProjectionVector::basis(l, MomentumIndex::new(1)).unwrap();
        assert!(matches!(project_signal(&psi, &chi), Err(Error::ProjectionAnnihilates(_))));
    }

    #[test]
    fn identity_transfer() {
        let l = LatticeSpec::line(5).unwrap();
        let r = transfer_localized(&UnitaryOperator::identity(l), MomentumIndex::ZERO).unwrap();
        assert!((r.fidelity_vs_direct - 1.0).abs() < 1e-15);
        assert!((r.idler_state.amplitude(MomentumIndex::ZERO).unwrap().norm() - 1.0).abs() < 1e-15);
        assert!((r.success_probability - 0.2).abs() < 1e-15);
    }

    #[test]
    fn general_reduces_to_localized() {
        let l = LatticeSpec::line(7).unwrap();
        let u = random_unitary(&l, 9);
        let k0 = MomentumIndex::new(-3);
        let a = transfer_localized(&u, k0).unwrap();
        let b = transfer_general(&u, &StateVector::basis(l, k0).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_route_trivial_inputs() {
        let l = LatticeSpec::line(7).unwrap();
        let u = ConvolutionKernel::new(
            l,
            (0..7).map(|k| Complex64::from_polar(1.0 / 7f64.sqrt(), k as f64)).collect(),
        )
        .unwrap();
        let v = transfer_kernel_route(&u, &StateVector::basis(l, MomentumIndex::ZERO).unwrap()).unwrap();
        for (a, b) in v.coefficients().iter().zip(u.coefficients()) {
            assert!((a - b).norm() < 1e-15);
        }
        let v = transfer_kernel_route(&u, &StateVector::basis(l, MomentumIndex::new(1)).unwrap()).unwrap();
        for m in l.indices() {
            let want = u.coefficient(MomentumIndex::new(l.wrap(m.x - 1))).unwrap();
            assert!((v.coefficient(m).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn project_after_kernel_reads_out_kernel() {
        let l = LatticeSpec::line(5).unwrap();
        let v = ConvolutionKernel::new(l, vec![c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8), c(0.0, 0.0)])
            .unwrap();
        let proj = project_after_kernel(&v, MomentumIndex::ZERO).unwrap();
        let d = distribution_of(&proj.idler_state);
        assert!((d.probability(MomentumIndex::new(-1)).unwrap() - 0.36).abs() < 1e-12);
        assert!((d.probability(MomentumIndex::new(1)).unwrap() - 0.64).abs() < 1e-12);
        assert!((proj.success_probability - 0.2).abs() < 1e-12);
        // projecting on k0 = 1 displaces the pattern by -1
        let proj = project_after_kernel(&v, MomentumIndex::new(1)).unwrap();
        let d = distribution_of(&proj.idler_state);
        assert!((d.probability(MomentumIndex::new(-2)).unwrap() - 0.36).abs() < 1e-12);
    }

    #[test]
    fn circuit_preparation_matches() {
        for n in [3, 5, 7, 9] {
            let l = LatticeSpec::line(n).unwrap();
            let prepared = prepare_correlated_state_via_circuit(&l).unwrap();
            assert!(prepared.max_abs_diff(&make_correlated_state(&l)).unwrap() <= EXACT_TOL);
        }
        assert!(LatticeSpec::line(2).is_err());
        assert!(prepare_correlated_state_via_circuit(&LatticeSpec::plane(3).unwrap()).is_err());
    }

    #[test]
    fn literal_swapped_gate_does_not_entangle() {
        // |j>|k> -> |k>|j+k mod d> acting on Σ_j |j>|0> leaves a product state
        let d = 5;
        let amp = 1.0 / (d as f64).sqrt();
        let mut out = Array2::<f64>::zeros((d, d));
        for j in 0..d {
            out[[0, j % d]] += amp;
        }
        let nonzero_rows = out.rows().into_iter().filter(|r| r.iter().any(|v| *v != 0.0)).count();
        assert_eq!(nonzero_rows, 1);
    }

    #[test]
    fn partner_convention_relabels() {
        let l = LatticeSpec::line(5).unwrap();
        let s = StateVector::basis(l, MomentumIndex::new(2)).unwrap();
        let p = IdlerConvention::Partner.relabel(&s);
        assert_eq!(p.amplitude(MomentumIndex::new(-2)).unwrap(), c(1.0, 0.0));
        assert_eq!(IdlerConvention::Direct.relabel(&s), s);
    }
}
