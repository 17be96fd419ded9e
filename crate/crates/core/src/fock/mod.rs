//! Truncated Fock-space linear algebra for one and two bosonic modes.

mod expm;
mod matrix;

pub use expm::matrix_exponential;
pub use matrix::ComplexMatrix;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{coherent_state, CoherentAmplitude};

/// Default tolerance for hermiticity and unit trace checks.
pub const DEFAULT_HERM_TOL: f64 = 1e-10;
/// Default tolerance on the smallest eigenvalue of a density matrix.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;
/// Normalization tolerance for pure two-mode states.
pub const NORM_TOL: f64 = 1e-12;

/// Number of retained Fock levels, `|0⟩ … |dim-1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self(dim))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockDim {
    type Error = Error;

    fn try_from(dim: usize) -> Result<Self> {
        Self::new(dim)
    }
}

impl From<FockDim> for usize {
    fn from(d: FockDim) -> usize {
        d.0
    }
}

/// Ladder operator `a` with `a[n-1, n] = √n`.
pub fn annihilation_matrix(dim: FockDim) -> ComplexMatrix {
    let d = dim.get();
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Number operator `a†a`.
pub fn number_operator(dim: FockDim) -> ComplexMatrix {
    let diag: Vec<C64> = (0..dim.get()).map(|n| C64::new(n as f64, 0.0)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// Kronecker product `A ⊗ B`; the index of `A` varies slowest.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Kronecker product of two vectors, with `u` as the slow index.
pub fn tensor_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().flat_map(|&x| v.iter().map(move |&y| x * y)).collect()
}

/// Fock basis vector `|n⟩`.
pub fn basis_vector(dim: usize, n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[n] = C64::new(1.0, 0.0);
    v
}

/// A validated single-mode density matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    herm_tol: f64,
    psd_tol: f64,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(mat, DEFAULT_HERM_TOL, DEFAULT_PSD_TOL)
    }

    /// Validates hermiticity, unit trace and positivity at the given tolerances.
    pub fn with_tolerances(mat: ComplexMatrix, herm_tol: f64, psd_tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Shape(format!("density matrix must be square, got {}x{}", mat.rows(), mat.cols())));
        }
        if mat.rows() < 2 {
            return Err(Error::InvalidDimension(mat.rows()));
        }
        if !mat.is_finite() {
            return Err(Error::Numerical("density matrix has non-finite entries".into()));
        }
        let herm = mat.max_abs_diff(&mat.adjoint());
        if herm > herm_tol {
            return Err(Error::Numerical(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        let tr = mat.trace();
        if (tr - 1.0).norm() > herm_tol {
            return Err(Error::Normalization((tr - 1.0).norm()));
        }
        // λ_min ≥ -psd_tol  ⇔  ρ + psd_tol·I is positive semidefinite.
        let n = mat.rows();
        let shifted = &mat + &ComplexMatrix::identity(n).scale_real(psd_tol.max(f64::MIN_POSITIVE));
        if !matrix::cholesky_succeeds(&shifted) {
            return Err(Error::Numerical(format!("matrix has an eigenvalue below -{psd_tol:e}")));
        }
        Ok(Self { mat, herm_tol, psd_tol })
    }

    /// Projector `|ψ⟩⟨ψ|` of a normalized vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn herm_tol(&self) -> f64 {
        self.herm_tol
    }

    pub fn psd_tol(&self) -> f64 {
        self.psd_tol
    }

    /// Diagonal populations `⟨n|ρ|n⟩`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.mat[(n, n)].re).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Pure(Vec<C64>),
    Mixed(ComplexMatrix),
}

/// State on `mode A ⊗ mode B`, stored with mode A as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    dim_a: FockDim,
    dim_b: FockDim,
    repr: Repr,
}

impl TwoModeState {
    /// Pure state from joint amplitudes `ψ[iA·dimB + iB]`.
    pub fn pure(amplitudes: Vec<C64>, dim_a: FockDim, dim_b: FockDim) -> Result<Self> {
        let n = dim_a.get() * dim_b.get();
        if amplitudes.len() != n {
            return Err(Error::Shape(format!("{} amplitudes for a joint space of dimension {n}", amplitudes.len())));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization((norm - 1.0).abs()));
        }
        Ok(Self { dim_a, dim_b, repr: Repr::Pure(amplitudes) })
    }

    /// Product state `|u⟩_A ⊗ |v⟩_B`.
    pub fn product(u: &[C64], v: &[C64]) -> Result<Self> {
        let dim_a = FockDim::new(u.len())?;
        let dim_b = FockDim::new(v.len())?;
        Self::pure(tensor_vec(u, v), dim_a, dim_b)
    }

    /// Mixed state from a joint density matrix.
    pub fn mixed(mat: ComplexMatrix, dim_a: FockDim, dim_b: FockDim) -> Result<Self> {
        let n = dim_a.get() * dim_b.get();
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::Shape(format!(
                "{}x{} density matrix for a joint space of dimension {n}",
                mat.rows(),
                mat.cols()
            )));
        }
        let tr = mat.trace();
        if (tr - 1.0).norm() > NORM_TOL {
            return Err(Error::Normalization((tr - 1.0).norm()));
        }
        Ok(Self { dim_a, dim_b, repr: Repr::Mixed(mat) })
    }

    pub fn dim_a(&self) -> FockDim {
        self.dim_a
    }

    pub fn dim_b(&self) -> FockDim {
        self.dim_b
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    pub fn is_pure_repr(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    /// `Σ|ψ|²` for pure states, `Tr ρ` for mixed ones.
    pub fn norm_sqr(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            Repr::Mixed(m) => m.trace().re,
        }
    }

    /// Expectation value of an operator diagonal in the joint Fock basis,
    /// given as a function of `(n_A, n_B)`.
    pub fn expect_diagonal(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let db = self.dim_b.get();
        match &self.repr {
            Repr::Pure(v) => v.iter().enumerate().map(|(i, z)| z.norm_sqr() * f(i / db, i % db)).sum(),
            Repr::Mixed(m) => (0..m.rows()).map(|i| m[(i, i)].re * f(i / db, i % db)).sum(),
        }
    }

    /// `Tr[ρ O]` for a joint operator `O`.
    pub fn expect(&self, op: &ComplexMatrix) -> Result<C64> {
        match &self.repr {
            Repr::Pure(v) => op.sandwich(v, v),
            Repr::Mixed(m) => Ok(m.matmul(op)?.trace()),
        }
    }

    /// `ψ ↦ Uψ` or `ρ ↦ UρU†`, for a unitary `U` on the joint space.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let n = self.dim_a.get() * self.dim_b.get();
        if u.rows() != n || u.cols() != n {
            return Err(Error::Shape(format!("{}x{} operator on a joint space of dimension {n}", u.rows(), u.cols())));
        }
        let repr = match &self.repr {
            Repr::Pure(v) => Repr::Pure(u.mul_vec(v)?),
            Repr::Mixed(m) => Repr::Mixed(&(u * m) * &u.adjoint()),
        };
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, repr })
    }
}

/// Reduced state of mode B, `Tr_A ρ`.
pub fn partial_trace_over_a(state: &TwoModeState) -> Result<DensityMatrix> {
    let (da, db) = (state.dim_a.get(), state.dim_b.get());
    let mut rho = ComplexMatrix::zeros(db, db);
    match &state.repr {
        Repr::Pure(v) => {
            if v.len() != da * db {
                return Err(Error::Shape("amplitude vector does not match the declared dimensions".into()));
            }
            for block in v.chunks_exact(db) {
                for j in 0..db {
                    if block[j].norm_sqr() == 0.0 {
                        continue;
                    }
                    for k in 0..db {
                        rho[(j, k)] += block[j] * block[k].conj();
                    }
                }
            }
        }
        Repr::Mixed(m) => {
            for i in 0..da {
                for j in 0..db {
                    for k in 0..db {
                        rho[(j, k)] += m[(i * db + j, i * db + k)];
                    }
                }
            }
        }
    }
    // Exact hermiticity; the summation above is only Hermitian up to rounding.
    let rho = ComplexMatrix::from_fn(db, db, |j, k| 0.5 * (rho[(j, k)] + rho[(k, j)].conj()));
    DensityMatrix::new(rho)
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    // Tr ρ² = Σ_jk |ρ_jk|² for Hermitian ρ.
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Uhlmann fidelity to the coherent state `|α⟩`, computed as `√⟨α|ρ|α⟩`.
pub fn fidelity_to_coherent(rho: &DensityMatrix, alpha: C64) -> Result<f64> {
    let dim = FockDim::new(rho.dim())?;
    let coh = coherent_state(CoherentAmplitude::new(alpha)?, dim)?;
    let overlap = rho.matrix().sandwich(coh.amplitudes(), coh.amplitudes())?.re;
    Ok(overlap.clamp(0.0, 1.0).sqrt())
}
