//! Seeded samplers for Haar states, random mixtures, collapsed ensembles and
//! priors bounded by a multiple of the Haar measure.

use std::fmt;
use std::str::FromStr;

use nalgebra::Complex;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::measurement::{block_pvm, collapse, measure_pure, validate_povm, PovmSet, PvmSet};
use crate::quantum::{CMatrix, CVector, DensityMatrix, PureState};

/// Generator identity echoed into every report.
pub const RNG_IDENTITY: &str = "chacha20 (rand_chacha 0.9; seed_from_u64, stream = trial key)";

const MAX_REJECTION_ATTEMPTS: u64 = 1 << 24;

/// A ChaCha20 stream fully determined by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream for one trial; streams of the same seed never overlap.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Haar-random pure state: i.i.d. standard complex Gaussians, normalized.
pub fn haar_pure(qubits: usize, rng: &mut SeededRng) -> PureState {
    let dim = 1usize << qubits;
    loop {
        let mut v = CVector::from_fn(dim, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(re, im)
        });
        let norm = v.norm();
        if norm > 0.0 {
            v.unscale_mut(norm);
            return PureState::from_vector_unchecked(v, qubits);
        }
    }
}

/// Law of the mixture weights on the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimplexLaw {
    /// Symmetric Dirichlet with the given concentration; `1.0` is uniform on the simplex.
    Dirichlet { concentration: f64 },
    /// All weights `1/M`.
    Equal,
}

impl Default for SimplexLaw {
    fn default() -> Self {
        Self::Dirichlet { concentration: 1.0 }
    }
}

impl fmt::Display for SimplexLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dirichlet { concentration } => write!(f, "dirichlet:{concentration}"),
            Self::Equal => f.write_str("equal"),
        }
    }
}

impl FromStr for SimplexLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name.trim() {
            "dirichlet" => {
                let concentration = if arg.is_empty() {
                    1.0
                } else {
                    arg.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad concentration {arg:?}")))?
                };
                if !(concentration > 0.0 && f64::is_finite(concentration)) {
                    return Err(Error::InvalidParameter(format!("concentration {concentration} must be positive")));
                }
                Ok(Self::Dirichlet { concentration })
            }
            "equal" if arg.is_empty() => Ok(Self::Equal),
            _ => Err(Error::InvalidParameter(format!("unknown simplex law {s:?}"))),
        }
    }
}

/// Number of Haar components and the law of their weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    pub components: usize,
    pub law: SimplexLaw,
}

impl MixtureSpec {
    pub fn new(components: usize, law: SimplexLaw) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidParameter("a mixture needs at least one component".into()));
        }
        Ok(Self { components, law })
    }
}

/// Draws a weight vector on the `M`-simplex.
pub fn simplex_weights(spec: &MixtureSpec, rng: &mut SeededRng) -> Result<Vec<f64>> {
    let m = spec.components;
    if m == 0 {
        return Err(Error::InvalidParameter("a mixture needs at least one component".into()));
    }
    match spec.law {
        SimplexLaw::Equal => Ok(vec![1.0 / m as f64; m]),
        SimplexLaw::Dirichlet { concentration } => {
            let gamma = Gamma::new(concentration, 1.0)
                .map_err(|e| Error::InvalidParameter(format!("gamma({concentration}): {e}")))?;
            loop {
                let draws: Vec<f64> = (0..m).map(|_| gamma.sample(rng)).collect();
                let total: f64 = draws.iter().sum();
                if total > 0.0 {
                    return Ok(draws.into_iter().map(|g| g / total).collect());
                }
            }
        }
    }
}

/// `Σ p_i |ψ_i⟩⟨ψ_i|` with `p ~ η` and i.i.d. Haar components.
pub fn mixed_state(qubits: usize, spec: &MixtureSpec, rng: &mut SeededRng) -> Result<DensityMatrix> {
    let weights = simplex_weights(spec, rng)?;
    let dim = 1usize << qubits;
    let mut entries = CMatrix::zeros(dim, dim);
    for w in weights {
        let psi = haar_pure(qubits, rng);
        let a = psi.amplitudes();
        entries.gerc(Complex::new(w, 0.0), a, a, Complex::new(1.0, 0.0));
    }
    Ok(DensityMatrix::from_matrix_unchecked(entries, qubits))
}

/// Random `outcomes`-element POVM: `E_k = V_k† V_k`, where the blocks `V_k` of
/// a Haar-like isometry `V: ℂ^d → ℂ^{d·outcomes}` are its consecutive `d` rows.
pub fn random_povm(qubits: usize, outcomes: usize, rng: &mut SeededRng) -> Result<PovmSet> {
    if outcomes == 0 {
        return Err(Error::EmptyMeasurement);
    }
    let dim = 1usize << qubits;
    let gaussian = CMatrix::from_fn(dim * outcomes, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im)
    });
    let isometry = gaussian.qr().q();
    let elements = (0..outcomes)
        .map(|k| {
            let block = isometry.rows(k * dim, dim);
            let e = block.ad_mul(&block);
            // Exact Hermitian symmetry; the product is Hermitian up to rounding.
            (&e + e.adjoint()).unscale(2.0)
        })
        .collect();
    validate_povm(elements)
}

/// Samples an outcome index from a probability vector.
pub(crate) fn sample_index(weights: &[f64], rng: &mut SeededRng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = k;
            if u < acc {
                return k;
            }
        }
    }
    last_positive
}

/// Haar state measured by `pvm` and collapsed onto the sampled outcome.
pub fn collapsed_sample_with(pvm: &PvmSet, qubits: usize, rng: &mut SeededRng) -> Result<(PureState, usize)> {
    loop {
        let psi = haar_pure(qubits, rng);
        let p = measure_pure(&psi, pvm.as_povm())?;
        let k = sample_index(p.weights(), rng);
        match collapse(&psi, pvm, k) {
            Ok(state) => return Ok((state, k)),
            // Only reachable for outcomes below the collapse threshold.
            Err(Error::ZeroProbabilityOutcome { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// One draw from the collapsed ensemble of `block_pvm(n, c)`.
pub fn collapsed_sample(qubits: usize, coarseness: usize, rng: &mut SeededRng) -> Result<(PureState, usize)> {
    collapsed_sample_with(&block_pvm(qubits, coarseness)?, qubits, rng)
}

#[derive(Debug, Clone)]
pub struct BiasedDraw {
    pub state: PureState,
    /// Haar proposals consumed, including the accepted one.
    pub attempts: u64,
}

/// Rejection sampling from the Haar measure with acceptance `weight(ψ) / 2^c`,
/// so the resulting density is at most `2^c` times Haar.
pub fn biased_prior_draw<W>(qubits: usize, c_bias: f64, weight: W, rng: &mut SeededRng) -> Result<BiasedDraw>
where
    W: Fn(&PureState) -> f64,
{
    if !(c_bias >= 0.0 && c_bias.is_finite()) {
        return Err(Error::InvalidParameter(format!("bias exponent {c_bias} must be nonnegative")));
    }
    let bound = c_bias.exp2();
    for attempts in 1..=MAX_REJECTION_ATTEMPTS {
        let psi = haar_pure(qubits, rng);
        let w = weight(&psi);
        if !(0.0..=bound).contains(&w) {
            return Err(Error::WeightOutOfBounds { weight: w, bound });
        }
        let u: f64 = rng.random();
        if u * bound < w {
            return Ok(BiasedDraw { state: psi, attempts });
        }
    }
    Err(Error::Numeric(format!("no proposal accepted in {MAX_REJECTION_ATTEMPTS} attempts")))
}

pub fn biased_prior_sample<W>(qubits: usize, c_bias: f64, weight: W, rng: &mut SeededRng) -> Result<PureState>
where
    W: Fn(&PureState) -> f64,
{
    biased_prior_draw(qubits, c_bias, weight, rng).map(|d| d.state)
}

/// Threshold `q` with `P_Haar(|⟨0|ψ⟩|² > q) = fraction`; `|⟨0|ψ⟩|²` is Beta(1, d−1).
pub fn first_weight_upper_quantile(qubits: usize, fraction: f64) -> f64 {
    let dim = (1usize << qubits) as f64;
    if dim <= 1.0 {
        return 0.0;
    }
    1.0 - fraction.powf(1.0 / (dim - 1.0))
}

/// Weight `2^c` on the Haar states whose `|⟨0|ψ⟩|²` lies in the top `2^{-c}`
/// fraction, zero elsewhere. Saturates the `2^c` density bound on that set.
pub fn top_fraction_weight(qubits: usize, c_bias: f64) -> impl Fn(&PureState) -> f64 + Send + Sync {
    let bound = c_bias.exp2();
    let threshold = first_weight_upper_quantile(qubits, (-c_bias).exp2());
    move |psi: &PureState| {
        if psi.amplitudes()[0].norm_sqr() > threshold {
            bound
        } else {
            0.0
        }
    }
}
