//! Estimators for algorithmic mutual information and self-information built
//! on a pluggable [`ComplexityModel`].
//!
//! `Î(i:j) = max(0, K̂(i) + K̂(j) − K̂(i,j))` where the joint term is the
//! smaller of the two chain-rule orders, so `Î` is symmetric by construction.
//! `Îp(p) = log₂ Σ_{i,j} 2^{Î(i:j)} p(i) p(j)`.

pub mod models;
pub mod tiny;

pub use models::{
    build_model, CodecModel, ComplexityModel, LengthModel, ModelKind, TinyMachineModel, TinySettings, ZeroModel,
};
pub use tiny::{enumerate_tiny_machine, TinyTable};

use crate::error::{Error, Result};
use crate::signals::FiniteProbability;

/// Above this the double sum is rescaled by `2^{-max Î}` before summing.
const RESCALE_ABOVE_BITS: f64 = 900.0;

/// Fixed-width big-endian binary encoding of outcome indices as ASCII `'0'`/`'1'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeEncoding {
    width: usize,
}

impl OutcomeEncoding {
    pub fn new(width: usize) -> Self {
        Self { width }
    }

    /// Narrowest width that distinguishes `count` outcomes.
    pub fn for_outcomes(count: usize) -> Self {
        Self { width: count.max(1).next_power_of_two().trailing_zeros() as usize }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn capacity(&self) -> usize {
        1usize.checked_shl(self.width as u32).unwrap_or(usize::MAX)
    }

    pub fn encode(&self, outcome: usize) -> Result<Vec<u8>> {
        if outcome >= self.capacity() {
            return Err(Error::OutcomeOutOfRange { outcome, count: self.capacity() });
        }
        Ok((0..self.width).rev().map(|bit| if outcome >> bit & 1 == 1 { b'1' } else { b'0' }).collect())
    }
}

/// Side string carrying a qubit count, as decimal digits.
pub fn side_for_qubits(qubits: usize) -> Vec<u8> {
    qubits.to_string().into_bytes()
}

pub fn k_hat(model: &dyn ComplexityModel, x: &[u8], side: &[u8]) -> f64 {
    model.complexity(x, side)
}

fn pair_information(model: &dyn ComplexityModel, xi: &[u8], ki: f64, xj: &[u8], kj: f64, side: &[u8]) -> f64 {
    let forward = ki + model.conditional(xj, xi, side);
    let backward = kj + model.conditional(xi, xj, side);
    (ki + kj - forward.min(backward)).max(0.0)
}

pub fn mutual_info_hat(
    model: &dyn ComplexityModel,
    i: usize,
    j: usize,
    encoding: &OutcomeEncoding,
    side: &[u8],
) -> Result<f64> {
    let (xi, xj) = (encoding.encode(i)?, encoding.encode(j)?);
    let (ki, kj) = (model.complexity(&xi, side), model.complexity(&xj, side));
    Ok(pair_information(model, &xi, ki, &xj, kj, side))
}

/// `log₂ Σ_{a,b} 2^{info(a,b)} w_a w_b` over the listed support, summed in
/// row-major order. Returns exactly zero when every pair carries no information.
fn log2_pair_sum(weights: &[f64], info: impl Fn(usize, usize) -> f64) -> f64 {
    let m = weights.len();
    let mut max_info = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            max_info = max_info.max(info(a, b));
        }
    }
    if max_info == 0.0 {
        return 0.0;
    }
    let shift = if max_info > RESCALE_ABOVE_BITS { max_info } else { 0.0 };
    let mut total = 0.0;
    for a in 0..m {
        for b in 0..m {
            total += (info(a, b) - shift).exp2() * weights[a] * weights[b];
        }
    }
    (shift + total.log2()).max(0.0)
}

/// `Îp(p)` over outcomes encoded by `encoding`, computed directly from the model.
pub fn self_info_hat(
    model: &dyn ComplexityModel,
    p: &FiniteProbability,
    encoding: &OutcomeEncoding,
    side: &[u8],
) -> Result<f64> {
    let outcomes = p.support().map(|(i, w)| Ok((encoding.encode(i)?, w))).collect::<Result<Vec<_>>>()?;
    self_info_of_strings(model, &outcomes, side)
}

/// `Îp` of an explicit list of `(outcome string, weight)` pairs. Terms are
/// summed in string order, so the value depends only on the multiset of pairs;
/// for a fixed-width encoding that is outcome-index order.
pub fn self_info_of_strings(model: &dyn ComplexityModel, outcomes: &[(Vec<u8>, f64)], side: &[u8]) -> Result<f64> {
    if let Some((_, w)) = outcomes.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidProbability(format!("weight {w}")));
    }
    let mut support: Vec<&(Vec<u8>, f64)> = outcomes.iter().filter(|(_, w)| *w > 0.0).collect();
    support.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let ks: Vec<f64> = support.iter().map(|(x, _)| model.complexity(x, side)).collect();
    let m = support.len();
    let mut info = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let v = pair_information(model, &support[a].0, ks[a], &support[b].0, ks[b], side);
            info[a * m + b] = v;
            info[b * m + a] = v;
        }
    }
    let weights: Vec<f64> = support.iter().map(|(_, w)| *w).collect();
    Ok(log2_pair_sum(&weights, |a, b| info[a * m + b]))
}

/// Precomputed `Î(i:j)` for every pair of outcomes of an encoding, so that
/// many probabilities over the same outcome space can be scored cheaply.
#[derive(Debug, Clone)]
pub struct PairwiseInfo {
    outcomes: usize,
    values: Vec<f64>,
    model_id: String,
}

impl PairwiseInfo {
    pub fn new(model: &dyn ComplexityModel, outcomes: usize, encoding: &OutcomeEncoding, side: &[u8]) -> Result<Self> {
        let strings = (0..outcomes).map(|i| encoding.encode(i)).collect::<Result<Vec<_>>>()?;
        let ks: Vec<f64> = strings.iter().map(|x| model.complexity(x, side)).collect();
        let row = |a: usize| -> Vec<f64> {
            (0..outcomes).map(|b| pair_information(model, &strings[a], ks[a], &strings[b], ks[b], side)).collect()
        };
        #[cfg(feature = "parallel")]
        let rows: Vec<Vec<f64>> = {
            use rayon::prelude::*;
            (0..outcomes).into_par_iter().map(row).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let rows: Vec<Vec<f64>> = (0..outcomes).map(row).collect();
        Ok(Self { outcomes, values: rows.concat(), model_id: model.id() })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.outcomes + j]
    }

    /// Same value as [`self_info_hat`] with the model, encoding and side used here.
    pub fn self_info(&self, p: &FiniteProbability) -> Result<f64> {
        if p.len() > self.outcomes {
            return Err(Error::DimensionMismatch { expected: self.outcomes, actual: p.len() });
        }
        let (idx, weights): (Vec<usize>, Vec<f64>) = p.support().unzip();
        Ok(log2_pair_sum(&weights, |a, b| self.get(idx[a], idx[b])))
    }
}
