//! Classical probabilities, channel kernels and grid convolution.

use crate::error::{Error, Result};

const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Channel outputs lighter than this are dropped before renormalizing.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
/// Gaussian kernels are truncated at this many standard deviations.
pub const GAUSSIAN_TRUNCATION: f64 = 5.0;

/// Nonnegative weights over outcomes `0..len` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbability {
    weights: Vec<f64>,
}

impl FiniteProbability {
    /// Accepts weights that already sum to one within tolerance.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidProbability(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    /// Clips negatives in `[-1e-9, 0)` to zero and divides by the total.
    pub fn renormalized(mut weights: Vec<f64>) -> Result<Self> {
        for w in weights.iter_mut() {
            if *w < 0.0 && *w >= -NORMALIZATION_TOLERANCE {
                *w = 0.0;
            }
        }
        check_weights(&weights)?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidProbability(format!("cannot normalize total {total}")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { weights })
    }

    pub fn point_mass(len: usize, outcome: usize) -> Result<Self> {
        if outcome >= len {
            return Err(Error::OutcomeOutOfRange { outcome, count: len });
        }
        let mut weights = vec![0.0; len];
        weights[outcome] = 1.0;
        Ok(Self { weights })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidProbability("empty outcome space".into()));
        }
        Ok(Self { weights: vec![1.0 / len as f64; len] })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, outcome: usize) -> f64 {
        self.weights.get(outcome).copied().unwrap_or(0.0)
    }

    /// Outcomes with strictly positive weight, in index order.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().copied().enumerate().filter(|&(_, w)| w > 0.0)
    }

    /// `alpha * self + (1 - alpha) * other`, padding the shorter outcome space with zeros.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("mixture weight {alpha} outside [0, 1]")));
        }
        let len = self.len().max(other.len());
        let weights = (0..len).map(|i| alpha * self.get(i) + (1.0 - alpha) * other.get(i)).collect();
        Self::renormalized(weights)
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidProbability("empty outcome space".into()));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidProbability(format!("weight {w} at outcome {i}")));
    }
    Ok(())
}

/// Conditional probabilities `f(x|z)`: one normalized row per input `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelKernel {
    rows: Vec<FiniteProbability>,
    outputs: usize,
}

impl ChannelKernel {
    pub fn new(rows: Vec<FiniteProbability>) -> Result<Self> {
        let outputs = rows
            .first()
            .map(FiniteProbability::len)
            .ok_or_else(|| Error::InvalidParameter("channel needs at least one row".into()))?;
        if let Some(bad) = rows.iter().find(|r| r.len() != outputs) {
            return Err(Error::DimensionMismatch { expected: outputs, actual: bad.len() });
        }
        Ok(Self { rows, outputs })
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::new((0..size).map(|z| FiniteProbability::point_mass(size, z)).collect::<Result<_>>()?)
    }

    /// Every input maps to the same output law.
    pub fn constant(inputs: usize, row: FiniteProbability) -> Result<Self> {
        Self::new(vec![row; inputs])
    }

    pub fn rows(&self) -> &[FiniteProbability] {
        &self.rows
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, input: usize) -> Option<&FiniteProbability> {
        self.rows.get(input)
    }
}

/// `fp(x) = Σ_z f(x|z) p(z)`. Renormalizes only when pruning dropped mass, so
/// deterministic kernels move weights without rounding.
pub fn apply_channel(kernel: &ChannelKernel, p: &FiniteProbability) -> Result<FiniteProbability> {
    let mut out = vec![0.0; kernel.outputs()];
    for (z, pz) in p.support() {
        let row = kernel.row(z).ok_or(Error::MissingChannelRow(z))?;
        for (x, fxz) in row.support() {
            out[x] += fxz * pz;
        }
    }
    let mut pruned = false;
    for w in out.iter_mut() {
        if *w > 0.0 && *w < PRUNE_THRESHOLD {
            *w = 0.0;
            pruned = true;
        }
    }
    if pruned {
        FiniteProbability::renormalized(out)
    } else {
        FiniteProbability::new(out)
    }
}

/// Deterministic channel `z ↦ ⌊z / block⌋` on `inputs` outcomes.
pub fn coarsen_kernel(inputs: usize, block: usize) -> Result<ChannelKernel> {
    if inputs == 0 || block == 0 || inputs % block != 0 {
        return Err(Error::InvalidParameter(format!("block {block} must be positive and divide {inputs}")));
    }
    let outputs = inputs / block;
    let rows = (0..inputs).map(|z| FiniteProbability::point_mass(outputs, z / block)).collect::<Result<_>>()?;
    ChannelKernel::new(rows)
}

/// A probability on the uniform grid `origin + i * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProbability1D {
    origin: f64,
    spacing: f64,
    probability: FiniteProbability,
}

impl GridProbability1D {
    pub fn new(origin: f64, spacing: f64, weights: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) || !origin.is_finite() {
            return Err(Error::InvalidParameter(format!("grid spacing {spacing}, origin {origin}")));
        }
        Ok(Self { origin, spacing, probability: FiniteProbability::new(weights)? })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn weights(&self) -> &[f64] {
        self.probability.weights()
    }

    /// The weights as a probability over cell indices.
    pub fn as_probability(&self) -> &FiniteProbability {
        &self.probability
    }

    pub fn position(&self, cell: usize) -> f64 {
        self.origin + cell as f64 * self.spacing
    }

    pub fn mean(&self) -> f64 {
        self.weights().iter().enumerate().map(|(i, w)| w * self.position(i)).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.weights().iter().enumerate().map(|(i, w)| w * (self.position(i) - mean).powi(2)).sum()
    }
}

/// Convolves with a grid-sampled Gaussian truncated at ±5σ. Mass pushed past
/// the grid edges is dropped and the result renormalized.
pub fn gaussian_convolve(p: &GridProbability1D, sigma: f64) -> Result<GridProbability1D> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let half = (GAUSSIAN_TRUNCATION * sigma / p.spacing()).floor() as isize;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|m| {
            let x = m as f64 * p.spacing();
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);

    let len = p.weights().len() as isize;
    let mut out = vec![0.0; len as usize];
    for (src, &w) in p.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (offset, k) in (-half..=half).zip(&kernel) {
            let dst = src as isize + offset;
            if (0..len).contains(&dst) {
                out[dst as usize] += w * k;
            }
        }
    }
    Ok(GridProbability1D {
        origin: p.origin(),
        spacing: p.spacing(),
        probability: FiniteProbability::renormalized(out)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_constant_channels() {
        let p = FiniteProbability::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert_eq!(apply_channel(&ChannelKernel::identity(3).unwrap(), &p).unwrap(), p);
        let q = FiniteProbability::new(vec![0.1, 0.9]).unwrap();
        let f = ChannelKernel::constant(3, q.clone()).unwrap();
        let out = apply_channel(&f, &p).unwrap();
        for (a, b) in out.weights().iter().zip(q.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn missing_row_is_rejected() {
        let p = FiniteProbability::uniform(4).unwrap();
        let f = ChannelKernel::identity(3).unwrap();
        assert!(matches!(apply_channel(&f, &p), Err(Error::MissingChannelRow(3))));
    }

    #[test]
    fn coarsening() {
        assert_eq!(coarsen_kernel(5, 1).unwrap(), ChannelKernel::identity(5).unwrap());
        let all = coarsen_kernel(4, 4).unwrap();
        let out = apply_channel(&all, &FiniteProbability::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap()).unwrap();
        assert_eq!(out.weights(), &[1.0]);
        let out = apply_channel(&coarsen_kernel(8, 2).unwrap(), &FiniteProbability::uniform(8).unwrap()).unwrap();
        assert_eq!(out.weights(), &[0.25; 4]);
        assert!(coarsen_kernel(6, 4).is_err());
        assert!(coarsen_kernel(6, 0).is_err());
    }

    #[test]
    fn probability_validation() {
        assert!(FiniteProbability::new(vec![0.5, 0.6]).is_err());
        assert!(FiniteProbability::new(vec![1.5, -0.5]).is_err());
        assert!(FiniteProbability::new(vec![]).is_err());
        let p = FiniteProbability::renormalized(vec![2.0, -1e-12, 2.0]).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn spike_spreads_symmetrically() {
        let mut w = vec![0.0; 41];
        w[20] = 1.0;
        let grid = GridProbability1D::new(-20.0, 1.0, w).unwrap();
        let out = gaussian_convolve(&grid, 1.0).unwrap();
        let o = out.weights();
        let mode = o.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(mode, 20);
        for k in 1..20 {
            assert!((o[20 - k] - o[20 + k]).abs() < 1e-15);
        }
        assert!(gaussian_convolve(&grid, 0.0).is_err());
    }
}
