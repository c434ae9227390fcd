//! Report types and writers.
//!
//! Table CSV columns: `experiment,n,c,variant,estimate_bits,std_error_bits,
//! sample_max_bits,samples,seed,model`, then one column per extra (sorted by
//! name), then `wall_time_ms` last. Trajectory CSV columns:
//! `t,purity,entropy,algorithmic_bits`. The JSON report carries the same data
//! plus a `meta` block; its layout is identified by [`SCHEMA`].

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use super::config::{format_time, ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::io::csv_error;
use crate::sampling::RNG_IDENTITY;

pub const SCHEMA: &str = "qsignal-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub c: Option<usize>,
    /// Which quantity the row measures, e.g. `sigma-a` or `baseline`.
    pub variant: String,
    pub estimate_bits: f64,
    pub std_error_bits: f64,
    /// Largest per-trial value; a value far above the estimate flags tail dominance.
    pub sample_max_bits: f64,
    pub samples: usize,
    pub seed: u64,
    pub model: String,
    pub extras: BTreeMap<String, f64>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub schema: &'static str,
    pub version: &'static str,
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub model: String,
    pub rng: &'static str,
    pub config: serde_json::Value,
}

impl Meta {
    pub fn new(cfg: &ExperimentConfig, model_id: String) -> Self {
        Self {
            schema: SCHEMA,
            version: VERSION,
            experiment: cfg.experiment,
            seed: cfg.seed,
            model: model_id,
            rng: RNG_IDENTITY,
            config: cfg.echo(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    #[serde(serialize_with = "serialize_time")]
    pub t: f64,
    pub purity: f64,
    pub entropy: f64,
}

fn serialize_time<S: serde::Serializer>(t: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if t.is_finite() {
        s.serialize_f64(*t)
    } else {
        s.serialize_str("inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Body {
    Table { rows: Vec<ReportRow> },
    Trajectory { n: usize, state: String, tau: f64, points: Vec<TrajectoryRow>, algorithmic_bits: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    #[serde(flatten)]
    pub body: Body,
}

impl Report {
    pub fn rows(&self) -> &[ReportRow] {
        match &self.body {
            Body::Table { rows } => rows,
            Body::Trajectory { .. } => &[],
        }
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        match &self.body {
            Body::Table { rows } => {
                let extras: BTreeSet<&str> = rows.iter().flat_map(|r| r.extras.keys().map(String::as_str)).collect();
                let mut header: Vec<&str> = vec![
                    "experiment",
                    "n",
                    "c",
                    "variant",
                    "estimate_bits",
                    "std_error_bits",
                    "sample_max_bits",
                    "samples",
                    "seed",
                    "model",
                ];
                header.extend(extras.iter().copied());
                header.push("wall_time_ms");
                out.write_record(&header).map_err(csv_error)?;
                for r in rows {
                    let mut record = vec![
                        r.experiment.name().to_string(),
                        r.n.to_string(),
                        r.c.map(|c| c.to_string()).unwrap_or_default(),
                        r.variant.clone(),
                        r.estimate_bits.to_string(),
                        r.std_error_bits.to_string(),
                        r.sample_max_bits.to_string(),
                        r.samples.to_string(),
                        r.seed.to_string(),
                        r.model.clone(),
                    ];
                    record.extend(extras.iter().map(|k| r.extras.get(*k).map(f64::to_string).unwrap_or_default()));
                    record.push(format!("{:.3}", r.wall_time_ms));
                    out.write_record(&record).map_err(csv_error)?;
                }
            }
            Body::Trajectory { points, algorithmic_bits, .. } => {
                out.write_record(["t", "purity", "entropy", "algorithmic_bits"]).map_err(csv_error)?;
                for p in points {
                    out.write_record([
                        format_time(p.t),
                        p.purity.to_string(),
                        p.entropy.to_string(),
                        algorithmic_bits.to_string(),
                    ])
                    .map_err(csv_error)?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}
