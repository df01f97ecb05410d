//! Two-qubit states (pure amplitude vectors and density matrices), the two
//! canonical states used throughout, and the operator-on-state primitives:
//! expectation values, state-dependent operator norms, and the transpose
//! identity on the maximally entangled state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{tensor, Mat2, Mat4};
use crate::{SPECTRAL_TOL, STRUCTURAL_TOL};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A normalized two-qubit state, either a pure amplitude vector over the
/// computational basis (|00>, |01>, |10>, |11>) or a 4x4 density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum TwoQubitState {
    Pure([Complex64; 4]),
    Mixed(Mat4),
}

impl TwoQubitState {
    /// Validate and wrap a pure state; the amplitudes must have unit norm.
    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self::Pure(amplitudes))
    }

    /// Validate and wrap a density matrix: Hermitian to 1e-12, unit trace to
    /// 1e-12, eigenvalues no lower than -1e-10.
    pub fn mixed(rho: Mat4) -> Result<Self> {
        let defect = rho.hermiticity_defect();
        if defect > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NonUnitTrace { trace });
        }
        let evals = rho.hermitian_eigenvalues()?;
        if evals[0] < -SPECTRAL_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: evals[0],
            });
        }
        Ok(Self::Mixed(rho))
    }

    /// `(|00> + |11>) / sqrt(2)`.
    pub fn maximally_entangled() -> Self {
        Self::Pure([
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ])
    }

    /// `(|01> - |10>) / sqrt(2)`.
    pub fn singlet() -> Self {
        Self::Pure([
            Complex64::ZERO,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
            Complex64::ZERO,
        ])
    }

    /// Singlet with white noise: `p |psi-><psi-| + (1 - p) I/4` for p in [0, 1].
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "Werner visibility must lie in [0, 1], got {p}"
            )));
        }
        let singlet_projector = match Self::singlet() {
            Self::Pure(amps) => outer_product(&amps),
            Self::Mixed(_) => unreachable!(),
        };
        let rho = singlet_projector.scale(p) + Mat4::identity().scale((1.0 - p) / 4.0);
        Ok(Self::Mixed(rho))
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64; 4]> {
        match self {
            Self::Pure(amps) => Some(amps),
            Self::Mixed(_) => None,
        }
    }

    /// Density matrix of the state, `|psi><psi|` for pure inputs.
    pub fn density(&self) -> Mat4 {
        match self {
            Self::Pure(amps) => outer_product(amps),
            Self::Mixed(rho) => *rho,
        }
    }

    /// The same state with the two qubits exchanged.
    pub fn swapped(&self) -> Self {
        const PERM: [usize; 4] = [0, 2, 1, 3];
        match self {
            Self::Pure(amps) => {
                Self::Pure([amps[PERM[0]], amps[PERM[1]], amps[PERM[2]], amps[PERM[3]]])
            }
            Self::Mixed(rho) => Self::Mixed(Mat4::from_fn(|i, j| rho[(PERM[i], PERM[j])])),
        }
    }
}

fn outer_product(amps: &[Complex64; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| amps[i] * amps[j].conj())
}

/// `|| O |psi> || = sqrt(<psi| O^dag O |psi>)`. Defined for pure states only.
pub fn state_norm(op: &Mat4, state: &TwoQubitState) -> Result<f64> {
    let amps = state.amplitudes().ok_or(Error::PureStateRequired)?;
    let image = op.mul_vec(amps);
    Ok(image.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
}

/// `tr[O rho]` for a Hermitian operator. The imaginary residue of the trace
/// must stay below 1e-10 and is discarded after the check.
pub fn expectation(op: &Mat4, state: &TwoQubitState) -> Result<f64> {
    let value = match state {
        TwoQubitState::Pure(amps) => {
            let image = op.mul_vec(amps);
            amps.iter()
                .zip(image.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
        }
        TwoQubitState::Mixed(rho) => (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| op[(i, j)] * rho[(j, i)])
            .sum::<Complex64>(),
    };
    if value.im.abs() > SPECTRAL_TOL {
        return Err(Error::NotHermitian {
            defect: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// `|| (I o M - M o I) |phi+> ||` for a transpose-symmetric 2x2 matrix M.
///
/// Entry-wise symmetry `m_ij = m_ji` in the computational basis (complex
/// entries allowed) is the hypothesis under which the norm vanishes; it is
/// checked before evaluating and violations are reported as errors.
pub fn transpose_identity_defect(m: &Mat2) -> Result<f64> {
    let defect = m.max_abs_diff(&m.transpose());
    if defect > STRUCTURAL_TOL {
        return Err(Error::NotTransposeSymmetric { defect });
    }
    let op = tensor(&Mat2::identity(), m) - tensor(m, &Mat2::identity());
    state_norm(&op, &TwoQubitState::maximally_entangled())
}
