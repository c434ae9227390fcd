//! Pointer-basis decoherence and the predictability sieves.
//!
//! The pointer basis is the computational basis. Every off-diagonal entry
//! decays by the same factor `e^{-t/τ}`; diagonals are untouched. Other pointer
//! bases are handled by rotating the input state first.

use crate::ait::{self, ComplexityModel, OutcomeEncoding};
use crate::error::{Error, Result};
use crate::quantum::{diagonal_probability, outer_product, purity, von_neumann_entropy, DensityMatrix, PureState};
use crate::signals::FiniteProbability;

/// Largest qubit count accepted by [`pointer_average`].
pub const MAX_POINTER_AVERAGE_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams {
    tau: f64,
}

impl DecoherenceParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("decoherence time {tau} must be positive")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `e^{-t/τ}`; zero at `t = ∞`.
    pub fn coherence_factor(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("interaction time {t} must be nonnegative")));
        }
        Ok((-t / self.tau).exp())
    }
}

pub fn decohere(rho: &DensityMatrix, t: f64, params: &DecoherenceParams) -> Result<DensityMatrix> {
    let factor = params.coherence_factor(t)?;
    let mut entries = rho.entries().clone();
    let d = rho.dim();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                entries[(i, j)] *= factor;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(entries, rho.qubits()))
}

/// The classical probability a state decoheres to as `t → ∞`.
pub fn limit_decohere(state: &PureState) -> FiniteProbability {
    diagonal_probability(state)
}

/// `Tr ρ(t)²`.
pub fn sieve_purity(state: &PureState, t: f64, params: &DecoherenceParams) -> Result<f64> {
    Ok(purity(&decohere(&outer_product(state), t, params)?))
}

/// `S(ρ(t))` in bits.
pub fn sieve_entropy(state: &PureState, t: f64, params: &DecoherenceParams) -> Result<f64> {
    von_neumann_entropy(&decohere(&outer_product(state), t, params)?)
}

/// Self-information of the fully decohered diagonal, relativized to the qubit count.
pub fn sieve_algorithmic(state: &PureState, model: &dyn ComplexityModel) -> Result<f64> {
    let n = state.qubits();
    ait::self_info_hat(model, &limit_decohere(state), &OutcomeEncoding::new(n), &ait::side_for_qubits(n))
}

/// Mean algorithmic sieve over all `2^n` pointer states, summed in index order.
pub fn pointer_average(qubits: usize, model: &dyn ComplexityModel) -> Result<f64> {
    if qubits > MAX_POINTER_AVERAGE_QUBITS {
        return Err(Error::InvalidParameter(format!("pointer average limited to {MAX_POINTER_AVERAGE_QUBITS} qubits")));
    }
    let dim = 1usize << qubits;
    let score = |k: usize| PureState::basis(qubits, k).and_then(|s| sieve_algorithmic(&s, model));
    #[cfg(feature = "parallel")]
    let scores: Vec<f64> = {
        use rayon::prelude::*;
        (0..dim).into_par_iter().map(score).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let scores: Vec<f64> = (0..dim).map(score).collect::<Result<_>>()?;
    Ok(scores.iter().sum::<f64>() / dim as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SievePoint {
    pub t: f64,
    pub purity: f64,
    pub entropy: f64,
}

pub fn sieve_trajectory(state: &PureState, times: &[f64], params: &DecoherenceParams) -> Result<Vec<SievePoint>> {
    let rho = outer_product(state);
    times
        .iter()
        .map(|&t| {
            let rho_t = decohere(&rho, t, params)?;
            Ok(SievePoint { t, purity: purity(&rho_t), entropy: von_neumann_entropy(&rho_t)? })
        })
        .collect()
}
