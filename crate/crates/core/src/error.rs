use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state norm {0} is not 1 within tolerance")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {deviation:e}){}", element_suffix(*.element))]
    NotHermitian { element: Option<usize>, deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e}){}", element_suffix(*.element))]
    NotPositive { element: Option<usize>, min_eigenvalue: f64 },

    #[error("trace {0} is not 1 within tolerance")]
    TraceNotOne(f64),

    #[error("POVM elements do not sum to the identity (max deviation {0:e})")]
    Incomplete(f64),

    #[error("PVM element {element} is not idempotent (max deviation {deviation:e})")]
    NotIdempotent { element: usize, deviation: f64 },

    #[error("PVM elements {first} and {second} are not orthogonal (max deviation {deviation:e})")]
    NotOrthogonal { first: usize, second: usize, deviation: f64 },

    #[error("empty measurement")]
    EmptyMeasurement,

    #[error("outcome {outcome} has probability {probability:e}; cannot collapse onto it")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("outcome {outcome} out of range (0..{count})")]
    OutcomeOutOfRange { outcome: usize, count: usize },

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("channel has no row for input {0}")]
    MissingChannelRow(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight {weight} exceeds the prior bound {bound}")]
    WeightOutOfBounds { weight: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("tiny-machine cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn element_suffix(element: Option<usize>) -> String {
    element.map(|k| format!(" in element {k}")).unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, Error>;
