//! Dense complex matrices at the two sizes the library needs: 2x2 single-qubit
//! operators and 4x4 two-qubit operators. Everything is double precision,
//! value-semantic, and immutable after construction.

// Index loops here are matrix coordinates, clearer than iterator chains.
#![allow(clippy::needless_range_loop)]

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::SPECTRAL_TOL;

/// Square complex matrix with compile-time dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize> {
    entries: [[Complex64; N]; N],
}

/// Single-qubit operator.
pub type Mat2 = Matrix<2>;
/// Two-qubit operator.
pub type Mat4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn new(entries: [[Complex64; N]; N]) -> Self {
        Self { entries }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = [[Complex64::ZERO; N]; N];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = f(i, j);
            }
        }
        Self { entries }
    }

    pub fn from_real(entries: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| Complex64::new(entries[i][j], 0.0))
    }

    pub fn zero() -> Self {
        Self {
            entries: [[Complex64::ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] * s)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].conj())
    }

    /// Entry-wise transpose in the computational basis (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i])
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64; N]) -> [Complex64; N] {
        let mut out = [Complex64::ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in v.iter().enumerate() {
                *o += self.entries[i][j] * x;
            }
        }
        out
    }

    /// Largest entry-wise deviation from `entry(i,j) = conj(entry(j,i))`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] + rhs.entries[i][j])
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j] - rhs.entries[i][j])
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.entries[i][j])
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut entries = [[Complex64::ZERO; N]; N];
        for i in 0..N {
            for k in 0..N {
                let a = self.entries[i][k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..N {
                    entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        Self { entries }
    }
}

impl Mat2 {
    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Self::new([
            [Complex64::ZERO, Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), Complex64::ZERO],
        ])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// Eigenvalues of a 2x2 Hermitian matrix, ascending, by the trace and
    /// determinant closed form (no iterative solver).
    pub fn hermitian_eigenvalues(&self) -> Result<[f64; 2]> {
        let defect = self.hermiticity_defect();
        if defect > SPECTRAL_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let mean = (self[(0, 0)].re + self[(1, 1)].re) / 2.0;
        let half_gap = (self[(0, 0)].re - self[(1, 1)].re) / 2.0;
        let radius = (half_gap * half_gap + self[(0, 1)].norm_sqr()).sqrt();
        Ok([mean - radius, mean + radius])
    }
}

impl Mat4 {
    /// Eigenvalues of a 4x4 Hermitian matrix, ascending.
    ///
    /// The complex Hermitian problem is embedded as the real symmetric 8x8
    /// matrix [[Re, -Im], [Im, Re]], whose spectrum is that of the original
    /// with every eigenvalue doubled, and solved by cyclic Jacobi rotations.
    pub fn hermitian_eigenvalues(&self) -> Result<[f64; 4]> {
        let defect = self.hermiticity_defect();
        if defect > SPECTRAL_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let mut embedded = [[0.0f64; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                let z = self[(i, j)];
                embedded[i][j] = z.re;
                embedded[i + 4][j + 4] = z.re;
                embedded[i][j + 4] = -z.im;
                embedded[i + 4][j] = z.im;
            }
        }
        // Jacobi assumes exact symmetry; average out rounding from the embedding.
        for i in 0..8 {
            for j in (i + 1)..8 {
                let s = (embedded[i][j] + embedded[j][i]) / 2.0;
                embedded[i][j] = s;
                embedded[j][i] = s;
            }
        }
        let evals = jacobi_symmetric_8(embedded);
        Ok([evals[0], evals[2], evals[4], evals[6]])
    }
}

/// Kronecker product of two single-qubit operators, ordered so the first
/// factor acts on the first qubit: `(A o B)[2i+k][2j+l] = A[i][j] B[k][l]`.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Trace out the first qubit, leaving an operator on the second.
pub fn trace_out_alice(m: &Mat4) -> Mat2 {
    Mat2::from_fn(|k, l| m[(k, l)] + m[(2 + k, 2 + l)])
}

/// Trace out the second qubit, leaving an operator on the first.
pub fn trace_out_bob(m: &Mat4) -> Mat2 {
    Mat2::from_fn(|i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)])
}

/// Eigenvalues of a real symmetric 8x8 matrix by cyclic Jacobi sweeps,
/// returned ascending. Converges far below the tolerances used elsewhere.
fn jacobi_symmetric_8(mut a: [[f64; 8]; 8]) -> [f64; 8] {
    const DIM: usize = 8;
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..DIM {
            for q in (p + 1)..DIM {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..DIM {
            for q in (p + 1)..DIM {
                let apq = a[p][q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..DIM {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = aip - s * (aiq + tau * aip);
                    a[p][i] = a[i][p];
                    a[i][q] = aiq + s * (aip - tau * aiq);
                    a[q][i] = a[i][q];
                }
            }
        }
    }

    let mut evals = [0.0f64; 8];
    for (i, e) in evals.iter_mut().enumerate() {
        *e = a[i][i];
    }
    evals.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    evals
}
