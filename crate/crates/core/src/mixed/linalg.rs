//! Dense complex matrices and the Hermitian eigensolver behind fidelities.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use super::MixedError;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-14;
/// Input Hermiticity tolerance, relative to the largest entry (or 1).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_TOL` count as zero when negative.
pub const PSD_TOL: f64 = 1e-10;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self, MixedError> {
        if data.len() != dim * dim {
            return Err(MixedError::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M − M†|` entrywise.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `V diag(values) V†`.
    pub fn from_eigen(vectors: &CMatrix, values: &[f64]) -> Self {
        let n = vectors.dim;
        Self::from_fn(n, |i, j| {
            (0..n)
                .map(|k| vectors[(i, k)] * values[k] * vectors[(j, k)].conj())
                .sum()
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Eigenvalues in ascending order with the matching eigenvectors as the
/// columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        CMatrix::from_eigen(&self.vectors, &self.values)
    }

    /// Eigenvalues at or below this level are indistinguishable from zero.
    pub(crate) fn noise_floor(&self, scale: f64) -> f64 {
        let top = self.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        16.0 * self.values.len() as f64 * f64::EPSILON * top.max(scale)
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the real symmetric rotation that zeroes it. Sweeps stop once the
/// off-diagonal Frobenius mass falls below `1e-14·‖M‖`.
pub fn hermitian_eigendecomposition(m: &CMatrix) -> Result<HermitianEigen, MixedError> {
    let n = m.dim();
    let deviation = m.hermiticity_error();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) || m.as_slice().iter().any(|z| !z.is_finite()) {
        return Err(MixedError::NotHermitian { deviation });
    }
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm();

    let off_mass = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_mass(&a) <= JACOBI_OFF_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // rotation block [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] on (p, q)
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * vpp + akq * vqp;
                    a[(k, q)] = akp * vpq + akq * vqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                    a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * vpp + vkq * vqp;
                    v[(k, q)] = vkp * vpq + vkq * vqq;
                }
            }
        }
    }
    if !converged && off_mass(&a) > JACOBI_OFF_TOL * norm {
        return Err(MixedError::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Principal square root of a positive semidefinite matrix,
/// `V diag(√max(λ, 0)) V†`.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix, MixedError> {
    let eig = hermitian_eigendecomposition(m)?;
    sqrt_from_eigen(&eig)
}

pub(crate) fn sqrt_from_eigen(eig: &HermitianEigen) -> Result<CMatrix, MixedError> {
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(MixedError::NotPsd { min_eigenvalue: min });
    }
    let floor = eig.noise_floor(0.0);
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
        .collect();
    Ok(CMatrix::from_eigen(&eig.vectors, &roots))
}
