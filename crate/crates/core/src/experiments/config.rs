//! Experiment configuration.
//!
//! Every command-line flag has a key of the same name in the TOML config
//! file (`c-bias`, `tiny-max-len`, ...). Integer lists accept `6`, `"4..10"`
//! (inclusive), `"4,6,8"` or `[4, 6, 8]`; time grids accept `"0,0.5,inf"` or
//! `"0..4:0.25"` (inclusive start..end:step).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ait::{ModelKind, TinySettings};
use crate::error::{Error, Result};
use crate::sampling::{MixtureSpec, SimplexLaw};

/// Largest qubit count the dense experiments accept.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    WhiteNoise,
    WhiteNoiseMixed,
    Collapse,
    BiasedPrior,
    Conservation,
    Trajectory,
    PointerAverage,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::WhiteNoise,
        Self::WhiteNoiseMixed,
        Self::Collapse,
        Self::BiasedPrior,
        Self::Conservation,
        Self::Trajectory,
        Self::PointerAverage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::WhiteNoise => "white-noise",
            Self::WhiteNoiseMixed => "white-noise-mixed",
            Self::Collapse => "collapse",
            Self::BiasedPrior => "biased-prior",
            Self::Conservation => "conservation",
            Self::Trajectory => "trajectory",
            Self::PointerAverage => "pointer-average",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment {s:?}")))
    }
}

/// Initial state for the sieve trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSpec {
    /// `|+⟩^{⊗n}`.
    Plus,
    Basis(usize),
    /// Haar-random, drawn from the configured seed.
    Haar,
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plus => f.write_str("plus"),
            Self::Basis(k) => write!(f, "basis:{k}"),
            Self::Haar => f.write_str("haar"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once(':') {
            Some(("basis", k)) => {
                k.trim().parse().map(Self::Basis).map_err(|_| Error::InvalidParameter(format!("bad basis index {k:?}")))
            }
            None if s.trim() == "plus" => Ok(Self::Plus),
            None if s.trim() == "haar" => Ok(Self::Haar),
            _ => Err(Error::InvalidParameter(format!("unknown state {s:?}"))),
        }
    }
}

/// Channel used by the conservation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelSpec {
    Identity,
    /// `z ↦ ⌊z / 2^c⌋`.
    Coarsen,
    /// Haar-random pure states measured in the computational basis.
    PrepareMeasure,
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Identity => "identity",
            Self::Coarsen => "coarsen",
            Self::PrepareMeasure => "prepare-measure",
        })
    }
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" => Ok(Self::Identity),
            "coarsen" => Ok(Self::Coarsen),
            "prepare-measure" => Ok(Self::PrepareMeasure),
            other => Err(Error::InvalidParameter(format!("unknown channel {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

/// An integer-list setting as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntListSetting {
    One(usize),
    Many(Vec<usize>),
    Text(String),
}

impl IntListSetting {
    pub fn resolve(&self) -> Result<Vec<usize>> {
        match self {
            Self::One(v) => Ok(vec![*v]),
            Self::Many(v) => Ok(v.clone()),
            Self::Text(s) => parse_int_list(s),
        }
    }
}

/// `"6"`, `"4..10"` (inclusive) or `"4,6,8"`.
pub fn parse_int_list(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("bad integer list {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

/// `"0,0.5,inf"` or `"0..4:0.25"`.
pub fn parse_time_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad time grid {s:?}"));
    let parse = |v: &str| -> Result<f64> {
        match v.trim() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            other => other.parse().map_err(|_| bad()),
        }
    };
    let times: Vec<f64> = if let Some((range, step)) = s.split_once(':') {
        let (a, b) = range.split_once("..").ok_or_else(bad)?;
        let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
        if !(step > 0.0 && a.is_finite() && b.is_finite() && b >= a) {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|k| a + k as f64 * step).collect()
    } else {
        s.split(',').map(parse).collect::<Result<_>>()?
    };
    if times.is_empty() || times.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(bad());
    }
    Ok(times)
}

/// Raw settings, as read from a config file or assembled from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    pub experiment: Option<String>,
    pub n: Option<IntListSetting>,
    pub c: Option<IntListSetting>,
    pub samples: Option<usize>,
    pub model: Option<String>,
    pub seed: Option<u64>,
    pub eta: Option<String>,
    pub components: Option<usize>,
    pub c_bias: Option<f64>,
    pub tau: Option<f64>,
    pub times: Option<String>,
    pub state: Option<String>,
    pub channel: Option<String>,
    pub povm: Option<PathBuf>,
    pub workers: Option<usize>,
    pub tiny_max_len: Option<u32>,
    pub tiny_budget: Option<u32>,
    pub tiny_cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config file: {e}")))
    }

    /// Fields set in `overrides` win.
    pub fn merged(self, overrides: Settings) -> Settings {
        Settings {
            experiment: overrides.experiment.or(self.experiment),
            n: overrides.n.or(self.n),
            c: overrides.c.or(self.c),
            samples: overrides.samples.or(self.samples),
            model: overrides.model.or(self.model),
            seed: overrides.seed.or(self.seed),
            eta: overrides.eta.or(self.eta),
            components: overrides.components.or(self.components),
            c_bias: overrides.c_bias.or(self.c_bias),
            tau: overrides.tau.or(self.tau),
            times: overrides.times.or(self.times),
            state: overrides.state.or(self.state),
            channel: overrides.channel.or(self.channel),
            povm: overrides.povm.or(self.povm),
            workers: overrides.workers.or(self.workers),
            tiny_max_len: overrides.tiny_max_len.or(self.tiny_max_len),
            tiny_budget: overrides.tiny_budget.or(self.tiny_budget),
            tiny_cache: overrides.tiny_cache.or(self.tiny_cache),
            out: overrides.out.or(self.out),
            format: overrides.format.or(self.format),
        }
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub qubits: Vec<usize>,
    pub coarseness: Vec<usize>,
    pub samples: usize,
    pub model: ModelKind,
    pub seed: u64,
    pub mixture: MixtureSpec,
    pub c_bias: f64,
    pub tau: f64,
    pub times: Vec<f64>,
    pub state: StateSpec,
    pub channel: ChannelSpec,
    pub povm: Option<PathBuf>,
    /// Worker threads; 0 uses every available core. Results do not depend on it.
    pub workers: usize,
    pub tiny_max_len: u32,
    pub tiny_budget: u32,
    pub tiny_cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

struct Defaults {
    qubits: &'static str,
    coarseness: &'static str,
    samples: usize,
}

fn defaults(kind: ExperimentKind) -> Defaults {
    let (qubits, coarseness, samples) = match kind {
        ExperimentKind::WhiteNoise => ("4..10", "0", 200),
        ExperimentKind::WhiteNoiseMixed => ("2..6", "0", 200),
        ExperimentKind::Collapse => ("6..10", "1..3", 200),
        ExperimentKind::BiasedPrior => ("6", "0", 400),
        ExperimentKind::Conservation => ("10", "2", 100),
        ExperimentKind::Trajectory => ("1", "0", 1),
        ExperimentKind::PointerAverage => ("2..10", "0", 1),
    };
    Defaults { qubits, coarseness, samples }
}

impl ExperimentConfig {
    /// Defaults for `kind` with no overrides.
    pub fn for_experiment(kind: ExperimentKind) -> Self {
        Self::from_settings(kind, &Settings::default()).expect("defaults are valid")
    }

    pub fn from_settings(kind: ExperimentKind, s: &Settings) -> Result<Self> {
        if let Some(named) = &s.experiment {
            let named: ExperimentKind = named.parse()?;
            if named != kind {
                return Err(Error::InvalidParameter(format!("config file is for {named}, but {kind} was requested")));
            }
        }
        let d = defaults(kind);
        let list = |v: &Option<IntListSetting>, default: &str| match v {
            Some(v) => v.resolve(),
            None => parse_int_list(default),
        };
        let tiny = TinySettings::default();
        let config = Self {
            experiment: kind,
            qubits: list(&s.n, d.qubits)?,
            coarseness: list(&s.c, d.coarseness)?,
            samples: s.samples.unwrap_or(d.samples),
            model: s.model.as_deref().unwrap_or("length").parse()?,
            seed: s.seed.unwrap_or(7),
            mixture: MixtureSpec::new(
                s.components.unwrap_or(4),
                s.eta.as_deref().map(str::parse).transpose()?.unwrap_or(SimplexLaw::default()),
            )?,
            c_bias: s.c_bias.unwrap_or(2.0),
            tau: s.tau.unwrap_or(1.0),
            times: parse_time_grid(s.times.as_deref().unwrap_or("0..4:0.25"))?,
            state: s.state.as_deref().unwrap_or("plus").parse()?,
            channel: s.channel.as_deref().unwrap_or("coarsen").parse()?,
            povm: s.povm.clone(),
            workers: s.workers.unwrap_or(0),
            tiny_max_len: s.tiny_max_len.unwrap_or(tiny.max_len),
            tiny_budget: s.tiny_budget.unwrap_or(tiny.budget),
            tiny_cache: s.tiny_cache.clone(),
            out: s.out.clone(),
            format: s.format.as_deref().unwrap_or("csv").parse()?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.qubits.is_empty() || self.coarseness.is_empty() {
            return bad("qubit and coarseness ranges must be nonempty".into());
        }
        if let Some(n) = self.qubits.iter().find(|&&n| n > MAX_QUBITS) {
            return bad(format!("{n} qubits exceeds the dense limit of {MAX_QUBITS}"));
        }
        if self.samples == 0 {
            return bad("sample count must be at least 1".into());
        }
        if !(self.c_bias >= 0.0 && self.c_bias.is_finite()) {
            return bad(format!("c-bias {} must be nonnegative", self.c_bias));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau {} must be positive", self.tau));
        }
        let needs_fine_c = matches!(self.experiment, ExperimentKind::Collapse);
        if needs_fine_c && self.coarseness.contains(&0) {
            return bad("collapse experiment needs c >= 1".into());
        }
        if matches!(self.experiment, ExperimentKind::Collapse | ExperimentKind::Conservation) {
            let max_n = *self.qubits.iter().max().unwrap();
            let min_c = *self.coarseness.iter().min().unwrap();
            if min_c > max_n {
                return bad(format!("coarseness {min_c} exceeds every qubit count"));
            }
        }
        if self.experiment == ExperimentKind::Trajectory {
            if self.qubits.len() != 1 {
                return bad("trajectory takes a single qubit count".into());
            }
            if let StateSpec::Basis(k) = self.state {
                if k >= 1 << self.qubits[0] {
                    return bad(format!("basis index {k} out of range"));
                }
            }
        }
        Ok(())
    }

    pub fn tiny_settings(&self) -> TinySettings {
        TinySettings { max_len: self.tiny_max_len, budget: self.tiny_budget, cache_dir: self.tiny_cache.clone() }
    }

    /// Echo of every parameter, for reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "experiment": self.experiment.name(),
            "n": self.qubits,
            "c": self.coarseness,
            "samples": self.samples,
            "model": self.model.name(),
            "seed": self.seed,
            "eta": self.mixture.law.to_string(),
            "components": self.mixture.components,
            "c-bias": self.c_bias,
            "tau": self.tau,
            "times": self.times.iter().map(|t| format_time(*t)).collect::<Vec<_>>(),
            "state": self.state.to_string(),
            "channel": self.channel.to_string(),
            "povm": self.povm.as_ref().map(|p| p.display().to_string()),
            "tiny-max-len": self.tiny_max_len,
            "tiny-budget": self.tiny_budget,
        })
    }
}

pub(crate) fn format_time(t: f64) -> String {
    if t.is_infinite() {
        "inf".into()
    } else {
        t.to_string()
    }
}
