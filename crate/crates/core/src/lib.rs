//! Simulation of quantum measurement and decoherence together with computable
//! estimates of the algorithmic self-information of the resulting classical
//! probabilities.

pub mod ait;
pub mod error;
pub mod experiments;
pub mod io;
pub mod measurement;
pub mod quantum;
pub mod sampling;
pub mod sieve;
pub mod signals;

pub use error::{Error, Result};
