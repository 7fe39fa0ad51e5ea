//! Dense unitaries, translation-invariant kernels and the signal-side
//! transfer unitary.

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::error::{Error, Result};
use crate::fft::{signed_frequency, Fft2};
use crate::lattice::{Distribution, LatticeSpec, MomentumIndex, StateVector, FFT_TOL};
use crate::mask::PhaseMask;

/// Oversampling demanded of a mask grid relative to the lattice half-width.
pub const OVERSAMPLING: usize = 8;

/// Element `(k', k)` is `<k'|U|k>`, rows and columns in lattice flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    lattice: LatticeSpec,
    matrix: Array2<Complex64>,
}

impl UnitaryOperator {
    /// Wraps a matrix after checking it is unitary within [`FFT_TOL`].
    pub fn new(lattice: LatticeSpec, matrix: Array2<Complex64>) -> Result<Self> {
        let n = lattice.mode_count();
        if matrix.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: matrix.len(),
            });
        }
        let check = check_unitarity(&matrix, FFT_TOL);
        if !check.unitary {
            return Err(Error::NotUnitary {
                deviation: check.max_deviation,
            });
        }
        Ok(Self { lattice, matrix })
    }

    pub fn identity(lattice: LatticeSpec) -> Self {
        let n = lattice.mode_count();
        Self {
            lattice,
            matrix: Array2::eye(n).mapv(|v: f64| Complex64::new(v, 0.0)),
        }
    }

    /// The negation permutation `|k> -> |-k>`.
    pub fn anti_identity(lattice: LatticeSpec) -> Self {
        let n = lattice.mode_count();
        let mut matrix = Array2::zeros((n, n));
        for k in 0..n {
            matrix[[lattice.negated_flat(k), k]] = Complex64::new(1.0, 0.0);
        }
        Self { lattice, matrix }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn element(&self, row: MomentumIndex, col: MomentumIndex) -> Result<Complex64> {
        Ok(self.matrix[[self.lattice.flat(row)?, self.lattice.flat(col)?]])
    }

    /// `U|state>`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.lattice.ensure_same(state.lattice())?;
        let amps = state.amplitudes();
        let out = self
            .matrix
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(amps).map(|(u, a)| u * a).sum())
            .collect();
        StateVector::new(self.lattice, out)
    }

    /// `self · other`.
    pub fn compose(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        self.lattice.ensure_same(&other.lattice)?;
        Ok(Self {
            lattice: self.lattice,
            matrix: self.matrix.dot(&other.matrix),
        })
    }
}

/// Outcome of [`check_unitarity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCheck {
    pub unitary: bool,
    pub max_deviation: f64,
}

/// `max |U^H U - I| <= tol`, element-wise.
pub fn check_unitarity(matrix: &Array2<Complex64>, tol: f64) -> UnitarityCheck {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return UnitarityCheck {
            unitary: false,
            max_deviation: f64::INFINITY,
        };
    }
    let mut max_dev: f64 = 0.0;
    for i in 0..cols {
        for j in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rows {
                acc += matrix[[k, i]].conj() * matrix[[k, j]];
            }
            if i == j {
                acc -= 1.0;
            }
            let d = acc.norm();
            // NaN must fail the check
            max_dev = if d.is_nan() { f64::NAN } else { max_dev.max(d) };
        }
    }
    UnitarityCheck {
        unitary: max_dev <= tol,
        max_deviation: max_dev,
    }
}

/// Translation-invariant kernel `u_m`, `U(k', k) = u_{k'-k}` on the periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionKernel {
    lattice: LatticeSpec,
    coefficients: Vec<Complex64>,
    leakage: f64,
}

impl ConvolutionKernel {
    /// Accepts coefficients whose squared norm is 1 within [`FFT_TOL`].
    pub fn new(lattice: LatticeSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        let k = Self::from_raw(lattice, coefficients)?;
        let norm = k.norm_sqr();
        if (norm - 1.0).abs() > FFT_TOL {
            return Err(Error::InvalidConfig(format!("kernel squared norm {norm} differs from 1")));
        }
        Ok(k)
    }

    pub(crate) fn from_raw(lattice: LatticeSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != lattice.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: lattice.mode_count(),
                actual: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("kernel"));
        }
        Ok(Self {
            lattice,
            coefficients,
            leakage: 0.0,
        })
    }

    /// `δ_{m, shift}`.
    pub fn delta(lattice: LatticeSpec, shift: MomentumIndex) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); lattice.mode_count()];
        c[lattice.flat(shift)?] = Complex64::new(1.0, 0.0);
        Self::new(lattice, c)
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: MomentumIndex) -> Result<Complex64> {
        Ok(self.coefficients[self.lattice.flat(m)?])
    }

    /// Spectral weight of the untruncated mask beyond `|m| <= M`.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy scaled to unit squared norm.
    pub fn renormalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            lattice: self.lattice,
            coefficients: self.coefficients.iter().map(|c| c / n).collect(),
            leakage: self.leakage,
        })
    }

    /// `P(m) = |u_m|^2`.
    pub fn distribution(&self) -> Result<Distribution> {
        Distribution::from_weights(
            self.lattice,
            self.coefficients.iter().map(|c| c.norm_sqr()).collect(),
        )
    }

    /// `Σ_m u_m |m>`.
    pub fn as_state(&self) -> Result<StateVector> {
        StateVector::new(self.lattice, self.coefficients.clone())
    }

    /// Circular shift `u_m -> u_{m - by}`.
    pub fn shifted(&self, by: MomentumIndex) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); self.coefficients.len()];
        for (f, v) in self.coefficients.iter().enumerate() {
            let to = self.lattice.wrap_index(self.lattice.index_at(f) + by);
            c[self.lattice.flat_unchecked(to)] = *v;
        }
        Self {
            lattice: self.lattice,
            coefficients: c,
            leakage: self.leakage,
        }
    }
}

/// Fourier coefficients of a 1D mask, `u_m = (1/S) Σ_j e^{iφ(x_j)} e^{-2πi mj/S}`.
///
/// Coefficients beyond `|m| <= M` are dropped and their weight reported as
/// [`ConvolutionKernel::leakage`]; the circulant is unitary only up to that
/// weight, and [`dense_from_kernel`] rejects it beyond tolerance. An integer linear tilt `p` shifts the
/// kernel, `u_m <- u_{m-p}`.
pub fn kernel_from_phase(mask: &PhaseMask) -> Result<ConvolutionKernel> {
    if mask.dims() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: mask.dims(),
        });
    }
    extract_kernel(mask)
}

/// 2D counterpart of [`kernel_from_phase`] over one period square.
pub fn kernel_from_phase_2d(mask: &PhaseMask) -> Result<ConvolutionKernel> {
    if mask.dims() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: mask.dims(),
        });
    }
    extract_kernel(mask)
}

fn integer_shift(slope: f64) -> Result<i32> {
    let r = slope.round();
    if (slope - r).abs() > 1e-9 {
        return Err(Error::NonIntegerShift(slope));
    }
    Ok(r as i32)
}

fn extract_kernel(mask: &PhaseMask) -> Result<ConvolutionKernel> {
    let lattice = *mask.lattice();
    let s = mask.samples_per_period();
    let half = lattice.half_width() as usize;
    let required = OVERSAMPLING * half;
    if s < required {
        return Err(Error::Undersampled {
            samples: s,
            half_width: half,
            required,
        });
    }
    let [sx, sy] = mask.linear_slope();
    let px = integer_shift(sx)?;
    let py = integer_shift(sy)?;

    let mut field = mask.phase().mapv(|p| Complex64::from_polar(1.0, p));
    let (rows, cols) = field.dim();
    Fft2::new(rows, cols).forward(&mut field);
    let scale = 1.0 / (rows * cols) as f64;

    let m = lattice.half_width();
    let mut coefficients = vec![Complex64::new(0.0, 0.0); lattice.mode_count()];
    let mut leakage = 0.0;
    for ((r, c), v) in field.indexed_iter() {
        let v = v * scale;
        let mx = signed_frequency(c, cols) as i32 + px;
        let my = if rows > 1 { signed_frequency(r, rows) as i32 + py } else { 0 };
        if mx.abs() > m || my.abs() > m {
            leakage += v.norm_sqr();
        } else {
            coefficients[lattice.flat_unchecked(MomentumIndex::new_2d(mx, my))] = v;
        }
    }
    let mut kernel = ConvolutionKernel::from_raw(lattice, coefficients)?;
    kernel.leakage = leakage;
    Ok(kernel)
}

/// Circulant matrix `M(k', k) = u_{(k'-k) mod N}` (component-wise in 2D),
/// without any unitarity check.
pub fn circulant_matrix(kernel: &ConvolutionKernel) -> Array2<Complex64> {
    let l = kernel.lattice;
    let n = l.mode_count();
    Array2::from_shape_fn((n, n), |(a, b)| {
        let d = l.wrap_index(l.index_at(a) - l.index_at(b));
        kernel.coefficients[l.flat_unchecked(d)]
    })
}

/// Dense circulant unitary of a kernel; fails if the kernel is not unitary.
pub fn dense_from_kernel(kernel: &ConvolutionKernel) -> Result<UnitaryOperator> {
    UnitaryOperator::new(kernel.lattice, circulant_matrix(kernel))
}

/// Signal-side operator `U'(k', k) = U(-k, k')`.
pub fn construct_transfer_unitary(u: &UnitaryOperator) -> UnitaryOperator {
    let l = u.lattice;
    let n = l.mode_count();
    let matrix = Array2::from_shape_fn((n, n), |(kp, k)| u.matrix[[l.negated_flat(k), kp]]);
    UnitaryOperator { lattice: l, matrix }
}

/// Haar-distributed unitary from a seeded complex Gaussian matrix
/// (Gram–Schmidt with positive diagonal of R).
pub fn random_unitary(lattice: &LatticeSpec, seed: u64) -> UnitaryOperator {
    let n = lattice.mode_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| Complex64::new(gauss(), gauss())).collect())
        .collect();
    for j in 0..n {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[i];
                let proj: Complex64 = q.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                for (v, a) in rest[0].iter_mut().zip(q) {
                    *v -= proj * a;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    let matrix = Array2::from_shape_fn((n, n), |(r, c)| cols[c][r]);
    UnitaryOperator {
        lattice: *lattice,
        matrix,
    }
}
