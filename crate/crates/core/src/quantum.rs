//! Dense state vectors and density matrices over `n`-qubit Hilbert spaces.
//!
//! Basis index `i` corresponds to the big-endian `n`-bit string of `i`, so
//! `|01⟩` on two qubits is index 1 and `|10⟩` is index 2.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::signals::FiniteProbability;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance used for every validity check on states and matrices.
pub const TOLERANCE: f64 = 1e-9;

const EIGEN_MAX_ITERATIONS: usize = 100_000;

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A unit-norm amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    qubits: usize,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for_dim(amplitudes.len())?;
        let amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, qubits })
    }

    /// Normalizes `amplitudes` before validating. Fails on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for_dim(amplitudes.len())?;
        let mut amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { amplitudes, qubits })
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::OutcomeOutOfRange { outcome: index, count: dim });
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes, qubits })
    }

    /// Equal-weight superposition of all basis states, `|+⟩^{⊗n}`.
    pub fn uniform(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amplitudes: CVector::from_element(dim, a), qubits }
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector, qubits: usize) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << qubits);
        Self { amplitudes, qubits }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Applies a unitary to the state and renormalizes away rounding drift.
    pub fn apply(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: unitary.nrows() });
        }
        Self::normalized((unitary * &self.amplitudes).iter().copied().collect())
    }
}

/// A Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    qubits: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), actual: entries.ncols() });
        }
        let qubits = qubits_for_dim(entries.nrows())?;
        let rho = Self { entries, qubits };
        rho.check()?;
        Ok(rho)
    }

    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        let dim = weights.len();
        let entries =
            CMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(weights[i], 0.0) } else { C64::new(0.0, 0.0) });
        Self::new(entries)
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let entries = CMatrix::identity(dim, dim).unscale(dim as f64);
        Self { entries, qubits }
    }

    pub(crate) fn from_matrix_unchecked(entries: CMatrix, qubits: usize) -> Self {
        debug_assert_eq!(entries.nrows(), 1 << qubits);
        Self { entries, qubits }
    }

    /// Re-runs every invariant check.
    pub fn check(&self) -> Result<()> {
        let deviation = hermitian_deviation(&self.entries);
        if deviation > TOLERANCE {
            return Err(Error::NotHermitian { element: None, deviation });
        }
        let trace = self.entries.trace();
        if (trace.re - 1.0).abs() > TOLERANCE || trace.im.abs() > TOLERANCE {
            return Err(Error::TraceNotOne(trace.re));
        }
        let min_eigenvalue = hermitian_eigenvalues(&self.entries)?.into_iter().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -TOLERANCE {
            return Err(Error::NotPositive { element: None, min_eigenvalue });
        }
        Ok(())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.entries)
    }
}

/// A pure state of a system coupled to an environment. Amplitude index is
/// `system_index * env_dim + env_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amplitudes: CVector,
    system_dim: usize,
    env_dim: usize,
}

impl JointState {
    pub fn new(amplitudes: Vec<C64>, system_dim: usize, env_dim: usize) -> Result<Self> {
        let expected = system_dim
            .checked_mul(env_dim)
            .ok_or_else(|| Error::InvalidParameter("joint dimension overflows".into()))?;
        if amplitudes.len() != expected || expected == 0 {
            return Err(Error::DimensionMismatch { expected, actual: amplitudes.len() });
        }
        let amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, system_dim, env_dim })
    }

    /// `|system⟩ ⊗ |env⟩`; the environment vector must be unit norm.
    pub fn product(system: &PureState, env: &[C64]) -> Result<Self> {
        let amplitudes = system.amplitudes().iter().flat_map(|s| env.iter().map(move |e| s * e)).collect();
        Self::new(amplitudes, system.dim(), env.len())
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn outer_product(state: &PureState) -> DensityMatrix {
    let a = state.amplitudes();
    let entries = a * a.adjoint();
    DensityMatrix::from_matrix_unchecked(entries, state.qubits())
}

/// Reduced density matrix of the system with the environment traced out.
pub fn partial_trace_env(joint: &JointState) -> Result<DensityMatrix> {
    let qubits = qubits_for_dim(joint.system_dim)?;
    let (ds, de) = (joint.system_dim, joint.env_dim);
    let a = joint.amplitudes();
    let entries = CMatrix::from_fn(ds, ds, |s, t| (0..de).map(|e| a[s * de + e] * a[t * de + e].conj()).sum());
    Ok(DensityMatrix::from_matrix_unchecked(entries, qubits))
}

/// `Tr ρ²`, computed as the squared Frobenius norm of the Hermitian matrix.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.entries().iter().map(|z| z.norm_sqr()).sum()
}

/// Von Neumann entropy in bits, with eigenvalues clipped to `[0, 1]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let entropy = rho
        .eigenvalues()?
        .into_iter()
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>();
    // Normalizes a pure state's -0.0 to 0.0.
    Ok(entropy + 0.0)
}

/// `p(i) = |⟨i|ψ⟩|²`.
pub fn diagonal_probability(state: &PureState) -> FiniteProbability {
    let weights = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    FiniteProbability::renormalized(weights).expect("a unit-norm state has a normalizable diagonal")
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    // The eigensolver reads one triangle; symmetrize so tiny asymmetries don't bias it.
    let sym = (m + m.adjoint()).unscale(2.0);
    SymmetricEigen::try_new(sym, f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .map(|e| e.eigenvalues.iter().copied().collect())
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))
}
