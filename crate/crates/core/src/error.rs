use thiserror::Error;

/// Errors raised by the simulator layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("momentum index ({x}, {y}) outside -{half_width}..={half_width}")]
    IndexOutOfRange { x: i32, y: i32, half_width: i32 },

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("operator is not unitary (max |U^H U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("{samples} samples per period undersample a lattice of half-width {half_width} (need at least {required})")]
    Undersampled {
        samples: usize,
        half_width: usize,
        required: usize,
    },

    #[error("linear phase coefficient {0} is not an integer multiple of the momentum quantum")]
    NonIntegerShift(f64),

    #[error("projection annihilates the state (success probability {0:.3e})")]
    ProjectionAnnihilates(f64),

    #[error("amplitude target {0} outside [0, 1]")]
    AmplitudeOutOfRange(f64),

    #[error("mode window |m| <= {window} exceeds the image extent")]
    WindowExceedsImage { window: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("circuit preparation deviates from the correlated state by {0:.3e}")]
    CircuitMismatch(f64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
