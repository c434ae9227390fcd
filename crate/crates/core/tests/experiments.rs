use qsignal::ait::{self_info_hat, side_for_qubits, CodecModel, LengthModel, ModelKind, OutcomeEncoding};
use qsignal::experiments::config::IntListSetting;
use qsignal::experiments::{
    exp_collapse_uptake, exp_white_noise_mixed, exp_white_noise_pure, run, run_with_model, ExperimentConfig,
    ExperimentKind, ReportRow, Settings,
};
use qsignal::measurement::{block_pvm, measure};
use qsignal::quantum::DensityMatrix;
use qsignal::sampling::{MixtureSpec, SimplexLaw};

fn config(kind: ExperimentKind, n: &str, c: &str, samples: usize, seed: u64) -> ExperimentConfig {
    let settings = Settings {
        n: Some(IntListSetting::Text(n.into())),
        c: Some(IntListSetting::Text(c.into())),
        samples: Some(samples),
        seed: Some(seed),
        ..Default::default()
    };
    ExperimentConfig::from_settings(kind, &settings).unwrap()
}

fn strip_time(rows: &[ReportRow]) -> Vec<ReportRow> {
    rows.iter().cloned().map(|r| ReportRow { wall_time_ms: 0.0, ..r }).collect()
}

fn assert_consistent(a: &[ReportRow], b: &[ReportRow]) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        let combined = x.std_error_bits.hypot(y.std_error_bits);
        let gap = (x.estimate_bits - y.estimate_bits).abs();
        assert!(
            gap <= 3.0 * combined + 1e-12,
            "n = {}: {} vs {} (se {combined})",
            x.n,
            x.estimate_bits,
            y.estimate_bits
        );
    }
}

#[test]
fn reports_are_bit_reproducible() {
    for kind in ExperimentKind::ALL {
        let mut cfg = ExperimentConfig::for_experiment(kind);
        cfg.samples = cfg.samples.min(20);
        cfg.qubits.retain(|&n| n <= 6);
        if cfg.qubits.is_empty() {
            cfg.qubits = vec![4];
        }
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(strip_time(a.rows()), strip_time(b.rows()), "{kind}");
        let mut threaded = cfg.clone();
        threaded.workers = 3;
        assert_eq!(strip_time(a.rows()), strip_time(run(&threaded).unwrap().rows()), "{kind}");
    }
}

#[test]
fn white_noise_is_consistent_across_seeds() {
    let a = exp_white_noise_pure(&config(ExperimentKind::WhiteNoise, "4..10", "0", 200, 1), &LengthModel).unwrap();
    let b = exp_white_noise_pure(&config(ExperimentKind::WhiteNoise, "4..10", "0", 200, 2), &LengthModel).unwrap();
    assert_consistent(&a, &b);
}

#[test]
fn codec_collapse_is_consistent_across_seeds() {
    let a = exp_collapse_uptake(&config(ExperimentKind::Collapse, "8", "2", 200, 1), &CodecModel).unwrap();
    let b = exp_collapse_uptake(&config(ExperimentKind::Collapse, "8", "2", 200, 2), &CodecModel).unwrap();
    assert_consistent(&a, &b);
}

#[test]
fn single_component_mixtures_match_pure_states() {
    let mut mixed = config(ExperimentKind::WhiteNoiseMixed, "2..6", "0", 200, 3);
    mixed.mixture = MixtureSpec::new(1, SimplexLaw::default()).unwrap();
    let pure = config(ExperimentKind::WhiteNoise, "2..6", "0", 200, 4);
    assert_consistent(
        &exp_white_noise_mixed(&mixed, &LengthModel).unwrap(),
        &exp_white_noise_pure(&pure, &LengthModel).unwrap(),
    );
}

#[test]
fn maximally_mixed_state_has_closed_form_signal() {
    for n in 1..=8 {
        let p = measure(&DensityMatrix::maximally_mixed(n), block_pvm(n, 0).unwrap().as_povm()).unwrap();
        let v = self_info_hat(&LengthModel, &p, &OutcomeEncoding::new(n), &side_for_qubits(n)).unwrap();
        let closed = (2.0 - (-(n as f64)).exp2()).log2();
        assert!((v - closed).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn json_report_echoes_configuration() {
    let mut cfg = config(ExperimentKind::Collapse, "5", "1..2", 10, 9);
    cfg.model = ModelKind::Length;
    let report = run_with_model(&cfg, &LengthModel).unwrap();
    let mut buf = Vec::new();
    report.write_json(&mut buf).unwrap();
    let json: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    assert_eq!(json["meta"]["config"], cfg.echo());
    assert_eq!(json["meta"]["seed"], 9);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    // Collapse uptake under the length model is exactly n − c.
    assert_eq!(json["rows"][0]["estimate_bits"], 4.0);
    assert_eq!(json["rows"][1]["estimate_bits"], 3.0);
}
