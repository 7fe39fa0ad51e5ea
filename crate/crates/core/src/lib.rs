//! Desk-scale simulator for nonlocal transfer of high-dimensional unitaries
//! across a momentum-correlated photon pair.
//!
//! Layers, bottom-up:
//! - [`lattice`]: periodic momentum lattice, single- and two-photon states.
//! - [`mask`] and [`unitary`]: phase masks, their convolution kernels, dense
//!   unitaries and the signal-side transfer unitary.
//! - [`transfer`]: the steer-and-project protocol, dense and kernel routes.
//! - [`optics`]: holograms, far-field imaging, camera binning, shot noise.
//! - [`retrieval`]: Gerchberg–Saxton phase retrieval with restarts.
//! - [`export`]: CSV and flat-binary grid files, distribution CSV.

pub mod error;
pub mod export;
pub mod fft;
pub mod lattice;
pub mod mask;
pub mod optics;
pub mod parse;
pub mod retrieval;
pub mod transfer;
pub mod unitary;

pub use error::{Error, Result};
pub use lattice::{
    distribution_of, fidelity, make_correlated_state, negate_index, BiphotonState, Distribution,
    LatticeSpec, MomentumIndex, StateVector,
};
pub use mask::{PhaseMask, PhaseProfile, PhaseTerm};
pub use optics::{
    bin_to_modes, extract_first_order, far_field, sample_poisson, similarity, synthesize_hologram, CameraSpec,
    EncodeMode, HologramSpec, PixelImage,
};
pub use retrieval::{align_phase, error_metric, gs_retrieve, GsConfig, GsResult};
pub use transfer::{
    apply_signal_unitary, prepare_correlated_state_via_circuit, project_after_kernel, project_signal,
    transfer_general, transfer_kernel_route, transfer_localized, IdlerConvention, ProjectionVector,
    TransferResult,
};
pub use unitary::{
    check_unitarity, construct_transfer_unitary, dense_from_kernel, kernel_from_phase,
    kernel_from_phase_2d, random_unitary, ConvolutionKernel, UnitaryOperator,
};
