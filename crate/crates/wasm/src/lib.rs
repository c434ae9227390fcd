//! Browser bindings for the interactive demo in `www/`.
//!
//! Each exported function has a plain-Rust twin returning `Result<_, String>`
//! so the numbers can be tested natively.

use qsignal::ait::{build_model, ModelKind, TinySettings};
use qsignal::experiments::config::IntListSetting;
use qsignal::experiments::{self, Body, ExperimentConfig, ExperimentKind, Settings};
use wasm_bindgen::prelude::*;

/// Largest qubit count the demo accepts, to keep the page responsive.
pub const MAX_DEMO_QUBITS: usize = 10;

fn settings(n: String, c: String, samples: usize, seed: u64, model: &str) -> Settings {
    Settings {
        n: Some(IntListSetting::Text(n)),
        c: Some(IntListSetting::Text(c)),
        samples: Some(samples),
        model: Some(model.to_string()),
        seed: Some(seed),
        ..Default::default()
    }
}

fn run(kind: ExperimentKind, s: &Settings) -> Result<experiments::Report, String> {
    let cfg = ExperimentConfig::from_settings(kind, s).map_err(|e| e.to_string())?;
    if cfg.qubits.iter().any(|&n| n > MAX_DEMO_QUBITS) {
        return Err(format!("the demo is limited to {MAX_DEMO_QUBITS} qubits"));
    }
    if cfg.model == ModelKind::Tiny {
        return Err("the tiny-machine model is not available in the browser".into());
    }
    let model = build_model(cfg.model, &TinySettings::default()).map_err(|e| e.to_string())?;
    experiments::run_with_model(&cfg, model.as_ref()).map_err(|e| e.to_string())
}

/// Flattened `[t, purity, entropy]` triples for `steps + 1` evenly spaced
/// times in `[0, t_max]`, followed by the algorithmic sieve (length model).
/// `state` is `plus`, `basis:<k>` or `haar`.
pub fn trajectory_points(
    n: usize,
    state: &str,
    tau: f64,
    t_max: f64,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    if steps == 0 || !(t_max > 0.0) {
        return Err("need at least one step and a positive end time".into());
    }
    let mut s = settings(n.to_string(), "0".into(), 1, seed, "length");
    s.state = Some(state.to_string());
    s.tau = Some(tau);
    s.times = Some((0..=steps).map(|k| (t_max * k as f64 / steps as f64).to_string()).collect::<Vec<_>>().join(","));
    match run(ExperimentKind::Trajectory, &s)?.body {
        Body::Trajectory { points, algorithmic_bits, .. } => {
            let mut out: Vec<f64> = points.iter().flat_map(|p| [p.t, p.purity, p.entropy]).collect();
            out.push(algorithmic_bits);
            Ok(out)
        }
        Body::Table { .. } => Err("unexpected report shape".into()),
    }
}

/// Flattened `[n, white-noise estimate, standard error, pointer average]`
/// rows for `n` in `n_min..=n_max`.
pub fn contrast_points(n_min: usize, n_max: usize, samples: usize, seed: u64, model: &str) -> Result<Vec<f64>, String> {
    let range = format!("{n_min}..{n_max}");
    let noise = run(ExperimentKind::WhiteNoise, &settings(range.clone(), "0".into(), samples, seed, model))?;
    let pointer = run(ExperimentKind::PointerAverage, &settings(range, "0".into(), 1, seed, model))?;
    Ok(noise
        .rows()
        .iter()
        .zip(pointer.rows())
        .flat_map(|(w, p)| [w.n as f64, w.estimate_bits, w.std_error_bits, p.estimate_bits])
        .collect())
}

/// Flattened `[c, estimate, n − 2c]` rows for `c` in `1..=n`.
pub fn collapse_points(n: usize, samples: usize, seed: u64, model: &str) -> Result<Vec<f64>, String> {
    let report = run(ExperimentKind::Collapse, &settings(n.to_string(), format!("1..{n}"), samples, seed, model))?;
    Ok(report
        .rows()
        .iter()
        .flat_map(|r| {
            let c = r.c.unwrap_or(0);
            [c as f64, r.estimate_bits, n as f64 - 2.0 * c as f64]
        })
        .collect())
}

#[wasm_bindgen]
pub fn sieve_trajectory(
    n: usize,
    state: &str,
    tau: f64,
    t_max: f64,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    trajectory_points(n, state, tau, t_max, steps, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn white_noise_contrast(
    n_min: usize,
    n_max: usize,
    samples: usize,
    seed: u64,
    model: &str,
) -> Result<Vec<f64>, JsError> {
    contrast_points(n_min, n_max, samples, seed, model).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn collapse_uptake(n: usize, samples: usize, seed: u64, model: &str) -> Result<Vec<f64>, JsError> {
    collapse_points(n, samples, seed, model).map_err(|e| JsError::new(&e))
}
