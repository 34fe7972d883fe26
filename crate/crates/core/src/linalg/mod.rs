//! Dense complex linear algebra: Hermitian matrices, an eigenvalue-only
//! solver, and the bipartite maps (partial trace, partial transpose,
//! reduction) on `C^n (x) C^k`.
//!
//! Composite indices follow `(i, a) -> i * k + a`, i.e. row-major over the
//! second tensor factor.

mod bipartite;
mod eigen;

pub use bipartite::{partial_trace_b, partial_transpose, reduction_b};
pub use eigen::{symmetric_tridiagonal_eigenvalues, tridiagonalize};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for positive-semidefiniteness decisions.
pub const DEFAULT_TAU: f64 = 1e-9;

/// Dimensions of a bipartite system `C^n (x) C^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    n: usize,
    k: usize,
}

impl Bipartition {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidParams(format!(
                "bipartition factors must be positive, got n={n}, k={k}"
            )));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total dimension `n * k`.
    pub fn dim(&self) -> usize {
        self.n * self.k
    }

    /// `min(n, k)`, the largest possible Schmidt rank.
    pub fn min_factor(&self) -> usize {
        self.n.min(self.k)
    }

    pub(crate) fn check(&self, m: &HermitianMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "matrix of dimension {} does not match bipartition {}x{}",
                m.dim(),
                self.n,
                self.k
            )));
        }
        Ok(())
    }
}

/// Dense general complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }
}

/// Dense Hermitian matrix. Hermitian symmetry holds exactly: the upper
/// triangle is always the conjugate of the lower one and the diagonal is
/// real.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from row-major entries.
    ///
    /// Entries must be finite and Hermitian up to `1e-10` relative to the
    /// largest magnitude; the stored matrix is the exact Hermitian part.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a square matrix of dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let mut data = entries;
        for i in 0..dim {
            for j in 0..i {
                let a = data[i * dim + j];
                let b = data[j * dim + i];
                if (a - b.conj()).norm() > 1e-10 * scale {
                    return Err(Error::InvalidMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) are not conjugate"
                    )));
                }
                let h = (a + b.conj()) * 0.5;
                data[i * dim + j] = h;
                data[j * dim + i] = h.conj();
            }
            data[i * dim + i].im = 0.0;
        }
        Ok(Self { dim, data })
    }

    /// Builds from a closure evaluated on the lower triangle (`j <= i`).
    pub fn from_lower(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..i {
                let z = f(i, j);
                data[i * dim + j] = z;
                data[j * dim + i] = z.conj();
            }
            data[i * dim + i] = Complex64::new(f(i, i).re, 0.0);
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_lower(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    /// Rank-one projector-like matrix `psi psi^*` (not normalized).
    pub fn outer(psi: &[Complex64]) -> Self {
        Self::from_lower(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "cannot combine dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * alpha + b * beta)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (self.dim, other.dim);
        let d = p * q;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..p {
            for a in 0..q {
                for j in 0..p {
                    let s = self.data[i * p + j];
                    for b in 0..q {
                        data[(i * q + a) * d + j * q + b] = s * other.data[a * q + b];
                    }
                }
            }
        }
        Self { dim: d, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Householder reduction to real symmetric tridiagonal form followed by
/// implicit QL with Wilkinson-type shifts; no eigenvectors are formed.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let (mut diag, mut off) = tridiagonalize(m);
    symmetric_tridiagonal_eigenvalues(&mut diag, &mut off)?;
    Ok(diag)
}

pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Spectral norm from an ascending eigenvalue list.
pub fn spectral_norm_of(eigs: &[f64]) -> f64 {
    match (eigs.first(), eigs.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

/// Positive-semidefiniteness with the scale-aware tolerance
/// `min eig >= -tau * max(1, ||M||_2)`.
pub fn is_psd(m: &HermitianMatrix, tau: f64) -> Result<bool> {
    let eigs = hermitian_eigenvalues(m)?;
    Ok(eigs[0] >= -tau * spectral_norm_of(&eigs).max(1.0))
}
