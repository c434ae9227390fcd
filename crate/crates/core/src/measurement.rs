//! POVM and PVM measurements, projective collapse, and the prepare-and-measure channel.

use crate::error::{Error, Result};
use crate::quantum::{
    hermitian_deviation, hermitian_eigenvalues, CMatrix, CVector, DensityMatrix, PureState, C64, TOLERANCE,
};
use crate::signals::{ChannelKernel, FiniteProbability};

/// Outcomes whose probability is at or below this cannot be collapsed onto.
pub const COLLAPSE_THRESHOLD: f64 = 1e-12;

/// One measurement operator. `Block` is the projector onto the contiguous
/// computational-basis range `start..start + len`, stored without the matrix
/// so that fine-grained PVMs on 10+ qubits stay cheap.
#[derive(Debug, Clone, PartialEq)]
pub enum PovmElement {
    Dense(CMatrix),
    Block { start: usize, len: usize },
}

impl PovmElement {
    pub fn to_dense(&self, dim: usize) -> CMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Block { start, len } => CMatrix::from_fn(dim, dim, |i, j| {
                if i == j && (*start..start + len).contains(&i) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// `Tr(E σ)`, still complex.
    fn trace_with(&self, sigma: &CMatrix) -> C64 {
        match self {
            Self::Dense(e) => {
                let d = e.nrows();
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        acc += e[(i, j)] * sigma[(j, i)];
                    }
                }
                acc
            }
            Self::Block { start, len } => (*start..start + len).map(|i| sigma[(i, i)]).sum(),
        }
    }

    /// `⟨ψ|E|ψ⟩`, still complex.
    fn expectation(&self, psi: &CVector) -> C64 {
        match self {
            Self::Dense(e) => psi.dotc(&(e * psi)),
            Self::Block { start, len } => C64::new(psi.rows(*start, *len).iter().map(|a| a.norm_sqr()).sum(), 0.0),
        }
    }

    /// `E|ψ⟩`.
    pub fn apply(&self, psi: &CVector) -> CVector {
        match self {
            Self::Dense(e) => e * psi,
            Self::Block { start, len } => CVector::from_fn(psi.len(), |i, _| {
                if (*start..start + len).contains(&i) {
                    psi[i]
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }
}

/// A validated POVM: Hermitian PSD elements summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet {
    elements: Vec<PovmElement>,
    dim: usize,
}

impl PovmSet {
    pub fn from_elements(elements: Vec<PovmElement>, dim: usize) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyMeasurement);
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("measurement dimension must be positive".into()));
        }
        let set = Self { elements, dim };
        set.check()?;
        Ok(set)
    }

    fn check(&self) -> Result<()> {
        let d = self.dim;
        let mut total = CMatrix::zeros(d, d);
        for (k, element) in self.elements.iter().enumerate() {
            match element {
                PovmElement::Dense(m) => {
                    if m.nrows() != d || m.ncols() != d {
                        return Err(Error::DimensionMismatch { expected: d, actual: m.nrows() });
                    }
                    let deviation = hermitian_deviation(m);
                    if deviation > TOLERANCE {
                        return Err(Error::NotHermitian { element: Some(k), deviation });
                    }
                    let min_eigenvalue = hermitian_eigenvalues(m)?.into_iter().fold(f64::INFINITY, f64::min);
                    if min_eigenvalue < -TOLERANCE {
                        return Err(Error::NotPositive { element: Some(k), min_eigenvalue });
                    }
                    total += m;
                }
                PovmElement::Block { start, len } => {
                    if start + len > d {
                        return Err(Error::DimensionMismatch { expected: d, actual: start + len });
                    }
                    for i in *start..start + len {
                        total[(i, i)] += C64::new(1.0, 0.0);
                    }
                }
            }
        }
        let deviation = (total - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > TOLERANCE {
            return Err(Error::Incomplete(deviation));
        }
        Ok(())
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcome_count(&self) -> usize {
        self.elements.len()
    }

    pub fn dense_elements(&self) -> Vec<CMatrix> {
        self.elements.iter().map(|e| e.to_dense(self.dim)).collect()
    }

    pub fn is_pvm(&self) -> bool {
        PvmSet::try_from_povm(self.clone()).is_ok()
    }
}

/// A POVM whose elements are mutually orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PvmSet(PovmSet);

impl PvmSet {
    pub fn try_from_povm(povm: PovmSet) -> Result<Self> {
        let all_blocks = povm.elements.iter().all(|e| matches!(e, PovmElement::Block { .. }));
        if !all_blocks {
            // Diagonal blocks that already sum to the identity are disjoint; anything
            // else is checked densely.
            let d = povm.dim;
            let dense = povm.dense_elements();
            for (k, e) in dense.iter().enumerate() {
                let deviation = max_abs(&(e * e - e));
                if deviation > TOLERANCE {
                    return Err(Error::NotIdempotent { element: k, deviation });
                }
            }
            for first in 0..dense.len() {
                for second in first + 1..dense.len() {
                    let deviation = max_abs(&(&dense[first] * &dense[second]));
                    if deviation > TOLERANCE {
                        return Err(Error::NotOrthogonal { first, second, deviation });
                    }
                }
            }
            debug_assert!(dense.iter().all(|e| e.nrows() == d));
        }
        Ok(Self(povm))
    }

    pub fn as_povm(&self) -> &PovmSet {
        &self.0
    }

    pub fn outcome_count(&self) -> usize {
        self.0.outcome_count()
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Validates a list of dense matrices as a POVM.
pub fn validate_povm(elements: Vec<CMatrix>) -> Result<PovmSet> {
    let dim = elements.first().ok_or(Error::EmptyMeasurement)?.nrows();
    PovmSet::from_elements(elements.into_iter().map(PovmElement::Dense).collect(), dim)
}

/// Validates a list of dense matrices as a PVM.
pub fn validate_pvm(elements: Vec<CMatrix>) -> Result<PvmSet> {
    PvmSet::try_from_povm(validate_povm(elements)?)
}

fn to_probability(raw: Vec<C64>) -> Result<FiniteProbability> {
    let mut weights = Vec::with_capacity(raw.len());
    for (k, z) in raw.into_iter().enumerate() {
        if z.im.abs() > TOLERANCE {
            return Err(Error::Numeric(format!("outcome {k} has imaginary probability {}", z.im)));
        }
        if z.re < -TOLERANCE {
            return Err(Error::Numeric(format!("outcome {k} has negative probability {}", z.re)));
        }
        weights.push(z.re.max(0.0));
    }
    FiniteProbability::renormalized(weights)
}

/// `Eσ(k) = Tr(E_k σ)`.
pub fn measure(sigma: &DensityMatrix, povm: &PovmSet) -> Result<FiniteProbability> {
    if sigma.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), actual: sigma.dim() });
    }
    to_probability(povm.elements().iter().map(|e| e.trace_with(sigma.entries())).collect())
}

/// `E|ψ⟩(k) = ⟨ψ|E_k|ψ⟩`, without forming the density matrix.
pub fn measure_pure(state: &PureState, povm: &PovmSet) -> Result<FiniteProbability> {
    if state.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), actual: state.dim() });
    }
    to_probability(povm.elements().iter().map(|e| e.expectation(state.amplitudes())).collect())
}

/// Projective post-measurement state `F_k|ψ⟩ / ‖F_k|ψ⟩‖`.
pub fn collapse(state: &PureState, pvm: &PvmSet, outcome: usize) -> Result<PureState> {
    let povm = pvm.as_povm();
    if state.dim() != povm.dim() {
        return Err(Error::DimensionMismatch { expected: povm.dim(), actual: state.dim() });
    }
    let element =
        povm.elements().get(outcome).ok_or(Error::OutcomeOutOfRange { outcome, count: povm.outcome_count() })?;
    let probability = element.expectation(state.amplitudes()).re;
    if probability <= COLLAPSE_THRESHOLD {
        return Err(Error::ZeroProbabilityOutcome { outcome, probability });
    }
    let mut projected = element.apply(state.amplitudes());
    let norm = projected.norm();
    projected.unscale_mut(norm);
    Ok(PureState::from_vector_unchecked(projected, state.qubits()))
}

/// `2^{n-c}` projectors; projector `j` spans basis indices `[j·2^c, (j+1)·2^c)`.
pub fn block_pvm(qubits: usize, coarseness: usize) -> Result<PvmSet> {
    if coarseness > qubits {
        return Err(Error::InvalidParameter(format!("coarseness {coarseness} exceeds qubit count {qubits}")));
    }
    let len = 1usize << coarseness;
    let blocks = 1usize << (qubits - coarseness);
    let elements = (0..blocks).map(|j| PovmElement::Block { start: j * len, len }).collect();
    PvmSet::try_from_povm(PovmSet::from_elements(elements, 1 << qubits)?)
}

/// Classical channel `f(k|i) = Tr(E_k ρ_i)` from a list of prepared states.
pub fn prepare_and_measure(states: &[DensityMatrix], povm: &PovmSet) -> Result<ChannelKernel> {
    let rows = states.iter().map(|rho| measure(rho, povm)).collect::<Result<_>>()?;
    ChannelKernel::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::outer_product;

    fn proj(dim: usize, idx: &[usize]) -> CMatrix {
        CMatrix::from_fn(
            dim,
            dim,
            |i, j| {
                if i == j && idx.contains(&i) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        )
    }

    #[test]
    fn validation_outcomes() {
        let basis = validate_povm(vec![proj(2, &[0]), proj(2, &[1])]).unwrap();
        assert!(basis.is_pvm());
        let half = CMatrix::identity(2, 2).unscale(2.0);
        let split = validate_povm(vec![half.clone(), half]).unwrap();
        assert!(!split.is_pvm());
        assert!(matches!(validate_povm(vec![proj(2, &[0])]), Err(Error::Incomplete(_))));
        assert!(matches!(validate_povm(vec![]), Err(Error::EmptyMeasurement)));
    }

    #[test]
    fn distinct_diagnostics() {
        let mut skew = proj(2, &[0]);
        skew[(0, 1)] = C64::new(0.3, 0.0);
        let rest = CMatrix::identity(2, 2) - &skew;
        assert!(matches!(validate_povm(vec![skew, rest]), Err(Error::NotHermitian { element: Some(0), .. })));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.5, 0.0), C64::new(0.0, 0.0)]));
        let comp = CMatrix::identity(2, 2) - &neg;
        assert!(matches!(validate_povm(vec![neg, comp]), Err(Error::NotPositive { element: Some(1), .. })));
    }

    #[test]
    fn pvm_diagnostics() {
        let half = CMatrix::identity(2, 2).unscale(2.0);
        assert!(matches!(validate_pvm(vec![half.clone(), half]), Err(Error::NotIdempotent { element: 0, .. })));
    }

    #[test]
    fn measure_examples() {
        let e = block_pvm(1, 0).unwrap();
        let p = measure(&outer_product(&PureState::basis(1, 0).unwrap()), e.as_povm()).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0]);
        let p = measure(&DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap(), e.as_povm()).unwrap();
        assert_eq!(p.weights(), &[0.25, 0.75]);
        let half = CMatrix::identity(2, 2).unscale(2.0);
        let split = validate_povm(vec![half.clone(), half]).unwrap();
        let p = measure(&outer_product(&PureState::uniform(1)), &split).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.5]);
        let p = measure_pure(&PureState::uniform(1), e.as_povm()).unwrap();
        assert!((p.get(0) - 0.5).abs() < 1e-15 && (p.get(1) - 0.5).abs() < 1e-15);
        assert!(matches!(measure_pure(&PureState::uniform(2), e.as_povm()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn collapse_examples() {
        let e = block_pvm(1, 0).unwrap();
        let out = collapse(&PureState::uniform(1), &e, 0).unwrap();
        assert!((out.amplitudes()[0].re - 1.0).abs() < 1e-15 && out.amplitudes()[1].norm() == 0.0);

        let halves = validate_pvm(vec![proj(4, &[0, 1]), proj(4, &[2, 3])]).unwrap();
        let out = collapse(&PureState::uniform(2), &halves, 0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [h, h, 0.0, 0.0];
        for (a, b) in out.amplitudes().iter().zip(expected) {
            assert!((a - C64::new(b, 0.0)).norm() < 1e-15);
        }

        assert!(matches!(
            collapse(&PureState::basis(1, 0).unwrap(), &e, 1),
            Err(Error::ZeroProbabilityOutcome { outcome: 1, .. })
        ));
    }

    #[test]
    fn block_pvm_shapes() {
        let f = block_pvm(2, 0).unwrap();
        assert_eq!(f.outcome_count(), 4);
        let f = block_pvm(2, 2).unwrap();
        assert_eq!(f.outcome_count(), 1);
        assert_eq!(f.as_povm().dense_elements()[0], CMatrix::identity(4, 4));
        let f = block_pvm(3, 1).unwrap();
        assert_eq!(f.outcome_count(), 4);
        let dense = validate_pvm(f.as_povm().dense_elements()).unwrap();
        assert_eq!(dense.outcome_count(), 4);
        assert!(block_pvm(2, 3).is_err());
    }

    #[test]
    fn prepare_and_measure_examples() {
        let e = block_pvm(1, 0).unwrap();
        let zero = outer_product(&PureState::basis(1, 0).unwrap());
        let one = outer_product(&PureState::basis(1, 1).unwrap());
        let f = prepare_and_measure(&[zero, one], e.as_povm()).unwrap();
        assert_eq!(f, ChannelKernel::identity(2).unwrap());

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = outer_product(&PureState::uniform(1));
        let minus = outer_product(&PureState::new(vec![C64::new(h, 0.0), C64::new(-h, 0.0)]).unwrap());
        let mixed = DensityMatrix::maximally_mixed(1);
        for states in [vec![plus, minus], vec![mixed.clone(), mixed]] {
            let f = prepare_and_measure(&states, e.as_povm()).unwrap();
            for row in f.rows() {
                assert!((row.get(0) - 0.5).abs() < 1e-15 && (row.get(1) - 0.5).abs() < 1e-15);
            }
        }
    }
}
