use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qsignal::experiments::config::IntListSetting;
use qsignal::experiments::{self, ExperimentConfig, ExperimentKind, OutputFormat, Settings};

/// Seeded Monte Carlo experiments on the algorithmic signal of quantum measurements.
#[derive(Debug, Parser)]
#[command(name = "qsignal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Self-information of Haar-random pure states measured in the pointer basis.
    WhiteNoise(Flags),
    /// Self-information of measured random mixtures.
    WhiteNoiseMixed(Flags),
    /// Signal of block measurements after wave-function collapse.
    Collapse(Flags),
    /// Haar-random states reweighted by a bounded density.
    BiasedPrior(Flags),
    /// Self-information before and after a classical channel.
    Conservation(Flags),
    /// Purity and entropy sieves along a decoherence time grid.
    Trajectory(Flags),
    /// Algorithmic sieve averaged over pointer states.
    PointerAverage(Flags),
}

impl Command {
    fn split(self) -> (ExperimentKind, Flags) {
        match self {
            Self::WhiteNoise(f) => (ExperimentKind::WhiteNoise, f),
            Self::WhiteNoiseMixed(f) => (ExperimentKind::WhiteNoiseMixed, f),
            Self::Collapse(f) => (ExperimentKind::Collapse, f),
            Self::BiasedPrior(f) => (ExperimentKind::BiasedPrior, f),
            Self::Conservation(f) => (ExperimentKind::Conservation, f),
            Self::Trajectory(f) => (ExperimentKind::Trajectory, f),
            Self::PointerAverage(f) => (ExperimentKind::PointerAverage, f),
        }
    }
}

#[derive(Debug, Args)]
struct Flags {
    /// TOML file whose keys mirror these flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Qubit counts: `6`, `4..10` or `4,6,8`.
    #[arg(long)]
    n: Option<String>,
    /// Coarseness values, same syntax as `--n`.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// zero, length, codec or tiny.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Mixture weight law: dirichlet, dirichlet:<alpha> or equal.
    #[arg(long)]
    eta: Option<String>,
    /// Pure states per mixture.
    #[arg(long)]
    components: Option<usize>,
    /// Log2 of the density bound for the biased prior.
    #[arg(long)]
    c_bias: Option<f64>,
    /// Decoherence time constant.
    #[arg(long)]
    tau: Option<f64>,
    /// Time grid: `0,0.5,inf` or `0..4:0.25`.
    #[arg(long)]
    times: Option<String>,
    /// Trajectory state: plus, basis:<k> or haar.
    #[arg(long)]
    state: Option<String>,
    /// Conservation channel: identity, coarsen or prepare-measure.
    #[arg(long)]
    channel: Option<String>,
    /// JSON POVM used instead of the pointer basis.
    #[arg(long)]
    povm: Option<PathBuf>,
    /// Worker threads, 0 for all cores. Output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    tiny_max_len: Option<u32>,
    #[arg(long)]
    tiny_budget: Option<u32>,
    /// Directory caching tiny-machine tables.
    #[arg(long)]
    tiny_cache: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl Flags {
    fn settings(&self) -> Settings {
        let list = |v: &Option<String>| v.clone().map(IntListSetting::Text);
        Settings {
            experiment: None,
            n: list(&self.n),
            c: list(&self.c),
            samples: self.samples,
            model: self.model.clone(),
            seed: self.seed,
            eta: self.eta.clone(),
            components: self.components,
            c_bias: self.c_bias,
            tau: self.tau,
            times: self.times.clone(),
            state: self.state.clone(),
            channel: self.channel.clone(),
            povm: self.povm.clone(),
            workers: self.workers,
            tiny_max_len: self.tiny_max_len,
            tiny_budget: self.tiny_budget,
            tiny_cache: self.tiny_cache.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
        }
    }
}

fn main() -> Result<()> {
    let (kind, flags) = Cli::parse().command.split();
    let file_settings = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Settings::from_toml(&text)?
        }
        None => Settings::default(),
    };
    let settings = file_settings.merged(flags.settings());
    let cfg = ExperimentConfig::from_settings(kind, &settings)?;
    let report = experiments::run(&cfg)?;

    let mut out: Box<dyn Write> = match &cfg.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(io::stdout().lock()),
    };
    match cfg.format {
        OutputFormat::Csv => report.write_csv(&mut out)?,
        OutputFormat::Json => report.write_json(&mut out)?,
    }
    out.flush()?;
    Ok(())
}
