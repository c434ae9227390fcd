//! Seeded Monte Carlo experiments and their reports.
//!
//! Every trial draws from its own stream keyed by (experiment, n, c, trial),
//! so a parameter point gives the same samples whether it runs alone or inside
//! a sweep, and results are reduced in trial order regardless of worker count.

pub mod config;
pub mod report;
pub mod stats;

use std::collections::BTreeMap;
use std::path::Path;

use crate::ait::{self, build_model, ComplexityModel, OutcomeEncoding, PairwiseInfo};
use crate::error::{Error, Result};
use crate::io::povm_from_json;
use crate::measurement::{block_pvm, measure, measure_pure, PovmSet};
use crate::quantum::{diagonal_probability, PureState};
use crate::sampling::{
    biased_prior_draw, collapsed_sample_with, haar_pure, mixed_state, simplex_weights, top_fraction_weight,
    MixtureSpec, SeededRng, SimplexLaw,
};
use crate::sieve::{pointer_average, sieve_algorithmic, sieve_trajectory, DecoherenceParams};
use crate::signals::{apply_channel, coarsen_kernel, ChannelKernel, FiniteProbability};

pub use config::{ChannelSpec, ExperimentConfig, ExperimentKind, OutputFormat, Settings, StateSpec};
pub use report::{Body, Meta, Report, ReportRow, TrajectoryRow};
use stats::{log_mean_exp2, median, sign_test_negative, std_error};

/// Largest number of spikes in a structured conservation input.
pub const MAX_SPIKES: usize = 4;

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum StreamTag {
    Haar = 1,
    Mixed = 2,
    Collapse = 3,
    Conservation = 4,
    ChannelStates = 5,
    Trajectory = 6,
}

fn stream_key(tag: StreamTag, n: usize, c: usize, trial: usize) -> u64 {
    (tag as u64) << 56 | (n as u64) << 48 | (c as u64) << 40 | trial as u64
}

fn trial_rng(cfg: &ExperimentConfig, tag: StreamTag, n: usize, c: usize, trial: usize) -> SeededRng {
    SeededRng::with_stream(cfg.seed, stream_key(tag, n, c, trial))
}

/// Runs independent trials, optionally on a pool of `workers` threads, and
/// returns their results in trial order.
struct Trials {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
    #[cfg(feature = "parallel")]
    parallel: bool,
}

impl Trials {
    fn new(workers: usize) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let pool = match workers {
                0 | 1 => None,
                w => Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(w)
                        .build()
                        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?,
                ),
            };
            Ok(Self { pool, parallel: workers != 1 })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Ok(Self {})
        }
    }

    fn run<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel {
            use rayon::prelude::*;
            let collect = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
            return match &self.pool {
                Some(pool) => pool.install(collect),
                None => collect(),
            };
        }
        (0..count).map(f).collect()
    }
}

/// Wall-clock timer; `wasm32-unknown-unknown` has no clock, so there it reads zero.
#[derive(Clone, Copy)]
struct Instant(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Instant {
    fn now() -> Self {
        #[cfg(not(target_arch = "wasm32"))]
        return Self(std::time::Instant::now());
        #[cfg(target_arch = "wasm32")]
        Self()
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    #[cfg(not(target_arch = "wasm32"))]
    return start.0.elapsed().as_secs_f64() * 1e3;
    #[cfg(target_arch = "wasm32")]
    {
        let _ = start;
        0.0
    }
}

struct RowBuilder<'a> {
    cfg: &'a ExperimentConfig,
    model_id: String,
}

impl RowBuilder<'_> {
    fn log_mean(&self, n: usize, c: Option<usize>, variant: &str, values: &[f64], start: Instant) -> ReportRow {
        let e = log_mean_exp2(values);
        ReportRow {
            experiment: self.cfg.experiment,
            n,
            c,
            variant: variant.to_string(),
            estimate_bits: e.estimate_bits,
            std_error_bits: e.std_error_bits,
            sample_max_bits: e.max_bits,
            samples: e.samples,
            seed: self.cfg.seed,
            model: self.model_id.clone(),
            extras: BTreeMap::new(),
            wall_time_ms: elapsed_ms(start),
        }
    }
}

fn load_povm(path: &Path) -> Result<PovmSet> {
    povm_from_json(&std::fs::read_to_string(path)?)
}

/// Scores measured distributions of one POVM; the default is the
/// computational basis, whose outcomes are the `n`-bit pointer strings.
struct PovmScorer {
    povm: PovmSet,
    table: PairwiseInfo,
}

impl PovmScorer {
    fn new(model: &dyn ComplexityModel, n: usize, custom: Option<&PovmSet>) -> Result<Self> {
        let povm = match custom {
            Some(p) if p.dim() != 1 << n => {
                return Err(Error::DimensionMismatch { expected: 1 << n, actual: p.dim() });
            }
            Some(p) => p.clone(),
            None => block_pvm(n, 0)?.as_povm().clone(),
        };
        let count = povm.outcome_count();
        let encoding = if custom.is_some() { OutcomeEncoding::for_outcomes(count) } else { OutcomeEncoding::new(n) };
        let table = PairwiseInfo::new(model, count, &encoding, &ait::side_for_qubits(n))?;
        Ok(Self { povm, table })
    }
}

/// `log₂ mean 2^{ς^A}` over Haar states for each `n`; with a configured POVM,
/// a second row scores the same states' distributions under that POVM.
pub fn exp_white_noise_pure(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Vec<ReportRow>> {
    let trials = Trials::new(cfg.workers)?;
    let rows = RowBuilder { cfg, model_id: model.id() };
    let custom = cfg.povm.as_deref().map(load_povm).transpose()?;
    let mut out = Vec::new();
    for &n in &cfg.qubits {
        let start = Instant::now();
        let pointer = PovmScorer::new(model, n, None)?;
        let extra = custom.as_ref().map(|p| PovmScorer::new(model, n, Some(p))).transpose()?;
        let values = trials.run(cfg.samples, |t| {
            let psi = haar_pure(n, &mut trial_rng(cfg, StreamTag::Haar, n, 0, t));
            let sigma_a = pointer.table.self_info(&diagonal_probability(&psi))?;
            let povm_value = match &extra {
                Some(s) => Some(s.table.self_info(&measure_pure(&psi, &s.povm)?)?),
                None => None,
            };
            Ok((sigma_a, povm_value))
        })?;
        let sigma_a: Vec<f64> = values.iter().map(|v| v.0).collect();
        out.push(rows.log_mean(n, None, "sigma-a", &sigma_a, start));
        if extra.is_some() {
            let povm_values: Vec<f64> = values.iter().filter_map(|v| v.1).collect();
            out.push(rows.log_mean(n, None, "povm", &povm_values, start));
        }
    }
    Ok(out)
}

/// `log₂ mean 2^{Îp(Eσ)}` over random mixtures `σ`.
pub fn exp_white_noise_mixed(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Vec<ReportRow>> {
    let trials = Trials::new(cfg.workers)?;
    let rows = RowBuilder { cfg, model_id: model.id() };
    let custom = cfg.povm.as_deref().map(load_povm).transpose()?;
    let mut out = Vec::new();
    for &n in &cfg.qubits {
        let start = Instant::now();
        let scorer = PovmScorer::new(model, n, custom.as_ref())?;
        let values = trials.run(cfg.samples, |t| {
            let sigma = mixed_state(n, &cfg.mixture, &mut trial_rng(cfg, StreamTag::Mixed, n, 0, t))?;
            scorer.table.self_info(&measure(&sigma, &scorer.povm)?)
        })?;
        let variant = if custom.is_some() { "povm" } else { "pointer" };
        let mut row = rows.log_mean(n, None, variant, &values, start);
        row.extras.insert("components".into(), cfg.mixture.components as f64);
        out.push(row);
    }
    Ok(out)
}

/// `Îp` of the block re-measurement of collapsed Haar states, block outcomes
/// encoded in `n − c` bits.
pub fn exp_collapse_uptake(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Vec<ReportRow>> {
    let trials = Trials::new(cfg.workers)?;
    let rows = RowBuilder { cfg, model_id: model.id() };
    let mut out = Vec::new();
    for &n in &cfg.qubits {
        for &c in cfg.coarseness.iter().filter(|&&c| c <= n) {
            if c == 0 {
                return Err(Error::InvalidParameter("collapse experiment needs c >= 1".into()));
            }
            let start = Instant::now();
            let pvm = block_pvm(n, c)?;
            let encoding = OutcomeEncoding::new(n - c);
            let side = ait::side_for_qubits(n);
            let values = trials.run(cfg.samples, |t| {
                let mut rng = trial_rng(cfg, StreamTag::Collapse, n, c, t);
                let (state, _) = collapsed_sample_with(&pvm, n, &mut rng)?;
                ait::self_info_hat(model, &measure_pure(&state, pvm.as_povm())?, &encoding, &side)
            })?;
            let mut row = rows.log_mean(n, Some(c), "collapsed", &values, start);
            row.extras.insert("lower_bound_bits".into(), n as f64 - 2.0 * c as f64);
            out.push(row);
        }
    }
    Ok(out)
}

/// `log₂ mean 2^{ς^A}` under a prior with density at most `2^{c_bias}` times
/// Haar, next to the Haar baseline. Both use the white-noise streams, so each
/// biased trial's first proposal is the baseline state of that trial.
pub fn exp_biased_prior(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Vec<ReportRow>> {
    let trials = Trials::new(cfg.workers)?;
    let rows = RowBuilder { cfg, model_id: model.id() };
    let mut out = Vec::new();
    for &n in &cfg.qubits {
        let start = Instant::now();
        let scorer = PovmScorer::new(model, n, None)?;
        let weight = top_fraction_weight(n, cfg.c_bias);
        let baseline = trials.run(cfg.samples, |t| {
            let psi = haar_pure(n, &mut trial_rng(cfg, StreamTag::Haar, n, 0, t));
            scorer.table.self_info(&diagonal_probability(&psi))
        })?;
        let baseline_row = rows.log_mean(n, None, "baseline", &baseline, start);
        let start = Instant::now();
        let biased = trials.run(cfg.samples, |t| {
            let draw = biased_prior_draw(n, cfg.c_bias, &weight, &mut trial_rng(cfg, StreamTag::Haar, n, 0, t))?;
            Ok((scorer.table.self_info(&diagonal_probability(&draw.state))?, draw.attempts))
        })?;
        let values: Vec<f64> = biased.iter().map(|b| b.0).collect();
        let attempts: u64 = biased.iter().map(|b| b.1).sum();
        let mut row = rows.log_mean(n, None, "biased", &values, start);
        row.extras.insert("c_bias".into(), cfg.c_bias);
        row.extras.insert("excess_bits".into(), row.estimate_bits - baseline_row.estimate_bits);
        row.extras.insert("acceptance_rate".into(), cfg.samples as f64 / attempts as f64);
        out.push(baseline_row);
        out.push(row);
    }
    Ok(out)
}

/// A sparse mixture of `1..=MAX_SPIKES` point masses at random outcomes.
pub fn structured_input(qubits: usize, rng: &mut SeededRng) -> Result<FiniteProbability> {
    use rand::Rng;
    let dim = 1usize << qubits;
    let spikes = rng.random_range(1..=MAX_SPIKES);
    let weights = simplex_weights(&MixtureSpec::new(spikes, SimplexLaw::default())?, rng)?;
    let mut p = vec![0.0; dim];
    for w in weights {
        p[rng.random_range(0..dim)] += w;
    }
    FiniteProbability::renormalized(p)
}

/// Prepare-and-measure channel: row `z` is the computational-basis
/// distribution of a Haar state drawn for `z`.
fn haar_measurement_kernel(cfg: &ExperimentConfig, n: usize, c: usize) -> Result<ChannelKernel> {
    let dim = 1usize << n;
    let mut rng = trial_rng(cfg, StreamTag::ChannelStates, n, c, 0);
    let rows = (0..dim).map(|_| diagonal_probability(&haar_pure(n, &mut rng))).collect();
    ChannelKernel::new(rows)
}

/// Paired `Îp` before and after a classical channel. The row estimate is the
/// median change; extras carry the sign test against "no decrease".
pub fn exp_channel_conservation(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Vec<ReportRow>> {
    let trials = Trials::new(cfg.workers)?;
    let mut out = Vec::new();
    for &n in &cfg.qubits {
        for &c in cfg.coarseness.iter().filter(|&&c| c <= n) {
            let start = Instant::now();
            let side = ait::side_for_qubits(n);
            let input_encoding = OutcomeEncoding::new(n);
            let (kernel, output_encoding) = match cfg.channel {
                ChannelSpec::Identity => (ChannelKernel::identity(1 << n)?, input_encoding),
                ChannelSpec::Coarsen => (coarsen_kernel(1 << n, 1 << c)?, OutcomeEncoding::new(n - c)),
                ChannelSpec::PrepareMeasure => (haar_measurement_kernel(cfg, n, c)?, input_encoding),
            };
            // Prepare-and-measure outputs have full support; score them from a table.
            let output_table = match cfg.channel {
                ChannelSpec::PrepareMeasure => Some(PairwiseInfo::new(model, 1 << n, &output_encoding, &side)?),
                _ => None,
            };
            let pairs = trials.run(cfg.samples, |t| {
                let p = structured_input(n, &mut trial_rng(cfg, StreamTag::Conservation, n, c, t))?;
                let before = ait::self_info_hat(model, &p, &input_encoding, &side)?;
                let q = apply_channel(&kernel, &p)?;
                let after = match &output_table {
                    Some(table) => table.self_info(&q)?,
                    None => ait::self_info_hat(model, &q, &output_encoding, &side)?,
                };
                Ok((before, after))
            })?;
            let diffs: Vec<f64> = pairs.iter().map(|(b, a)| a - b).collect();
            let sign = sign_test_negative(&diffs);
            let mut extras = BTreeMap::new();
            extras.insert("mean_before_bits".into(), stats::mean(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()));
            extras.insert("mean_after_bits".into(), stats::mean(&pairs.iter().map(|p| p.1).collect::<Vec<_>>()));
            extras.insert("negative".into(), sign.negative as f64);
            extras.insert("positive".into(), sign.positive as f64);
            extras.insert("ties".into(), sign.ties as f64);
            extras.insert("sign_p_value".into(), sign.p_value);
            out.push(ReportRow {
                experiment: cfg.experiment,
                n,
                c: (cfg.channel == ChannelSpec::Coarsen).then_some(c),
                variant: cfg.channel.to_string(),
                estimate_bits: median(&diffs),
                std_error_bits: std_error(&diffs),
                sample_max_bits: diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                samples: diffs.len(),
                seed: cfg.seed,
                model: model.id(),
                extras,
                wall_time_ms: elapsed_ms(start),
            });
            if cfg.channel != ChannelSpec::Coarsen {
                break;
            }
        }
    }
    Ok(out)
}

/// The configured initial state of a trajectory.
pub fn trajectory_state(cfg: &ExperimentConfig) -> Result<PureState> {
    let n = cfg.qubits[0];
    match cfg.state {
        StateSpec::Plus => Ok(PureState::uniform(n)),
        StateSpec::Basis(k) => PureState::basis(n, k),
        StateSpec::Haar => Ok(haar_pure(n, &mut trial_rng(cfg, StreamTag::Trajectory, n, 0, 0))),
    }
}

/// Purity and entropy sieves over the time grid, plus the algorithmic sieve
/// of the fully decohered state.
pub fn exp_sieve_trajectory(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Body> {
    let state = trajectory_state(cfg)?;
    let params = DecoherenceParams::new(cfg.tau)?;
    let points = sieve_trajectory(&state, &cfg.times, &params)?
        .into_iter()
        .map(|p| TrajectoryRow { t: p.t, purity: p.purity, entropy: p.entropy })
        .collect();
    Ok(Body::Trajectory {
        n: state.qubits(),
        state: cfg.state.to_string(),
        tau: cfg.tau,
        points,
        algorithmic_bits: sieve_algorithmic(&state, model)?,
    })
}

/// Mean algorithmic sieve over all pointer states for each `n`.
pub fn exp_pointer_average(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Vec<ReportRow>> {
    cfg.qubits
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let value = pointer_average(n, model)?;
            Ok(ReportRow {
                experiment: cfg.experiment,
                n,
                c: None,
                variant: "pointer".into(),
                estimate_bits: value,
                std_error_bits: 0.0,
                sample_max_bits: value,
                samples: 1 << n,
                seed: cfg.seed,
                model: model.id(),
                extras: BTreeMap::new(),
                wall_time_ms: elapsed_ms(start),
            })
        })
        .collect()
}

/// Runs `cfg` with an already built model.
pub fn run_with_model(cfg: &ExperimentConfig, model: &dyn ComplexityModel) -> Result<Report> {
    cfg.validate()?;
    let table = |rows| Body::Table { rows };
    let body = match cfg.experiment {
        ExperimentKind::WhiteNoise => table(exp_white_noise_pure(cfg, model)?),
        ExperimentKind::WhiteNoiseMixed => table(exp_white_noise_mixed(cfg, model)?),
        ExperimentKind::Collapse => table(exp_collapse_uptake(cfg, model)?),
        ExperimentKind::BiasedPrior => table(exp_biased_prior(cfg, model)?),
        ExperimentKind::Conservation => table(exp_channel_conservation(cfg, model)?),
        ExperimentKind::Trajectory => exp_sieve_trajectory(cfg, model)?,
        ExperimentKind::PointerAverage => table(exp_pointer_average(cfg, model)?),
    };
    Ok(Report { meta: Meta::new(cfg, model.id()), body })
}

/// Builds the configured model and runs `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let model = build_model(cfg.model, &cfg.tiny_settings())?;
    run_with_model(cfg, model.as_ref())
}
