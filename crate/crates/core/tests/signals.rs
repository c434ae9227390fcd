use proptest::prelude::*;
use qsignal::ait::LengthModel;
use qsignal::ait::ModelKind;
use qsignal::experiments::{exp_channel_conservation, ChannelSpec, ExperimentConfig, ExperimentKind};
use qsignal::sampling::SeededRng;
use qsignal::signals::{
    apply_channel, coarsen_kernel, gaussian_convolve, ChannelKernel, FiniteProbability, GridProbability1D,
};
use rand::Rng;

fn random_probability(len: usize, rng: &mut SeededRng) -> FiniteProbability {
    FiniteProbability::renormalized((0..len).map(|_| rng.random::<f64>() + 1e-3).collect()).unwrap()
}

fn random_kernel(inputs: usize, outputs: usize, rng: &mut SeededRng) -> ChannelKernel {
    ChannelKernel::new((0..inputs).map(|_| random_probability(outputs, rng)).collect()).unwrap()
}

proptest! {
    #[test]
    fn channels_preserve_probability(inputs in 1usize..=12, outputs in 1usize..=12, seed: u64) {
        let mut rng = SeededRng::new(seed);
        let kernel = random_kernel(inputs, outputs, &mut rng);
        let p = random_probability(inputs, &mut rng);
        let q = apply_channel(&kernel, &p).unwrap();
        prop_assert_eq!(q.len(), outputs);
        prop_assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(q.weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn channels_are_linear(inputs in 1usize..=10, outputs in 1usize..=10, seed: u64) {
        let mut rng = SeededRng::new(seed);
        let kernel = random_kernel(inputs, outputs, &mut rng);
        let (p, q) = (random_probability(inputs, &mut rng), random_probability(inputs, &mut rng));
        let (fp, fq) = (apply_channel(&kernel, &p).unwrap(), apply_channel(&kernel, &q).unwrap());
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let mixed = apply_channel(&kernel, &p.mix(&q, alpha).unwrap()).unwrap();
            for x in 0..outputs {
                let expected = alpha * fp.get(x) + (1.0 - alpha) * fq.get(x);
                prop_assert!((mixed.get(x) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coarsening_sums_blocks(bits in 0usize..=6, c_frac in 0.0f64..1.0, seed: u64) {
        let c = ((bits + 1) as f64 * c_frac) as usize;
        let c = c.min(bits);
        let mut rng = SeededRng::new(seed);
        let p = random_probability(1 << bits, &mut rng);
        let q = apply_channel(&coarsen_kernel(1 << bits, 1 << c).unwrap(), &p).unwrap();
        for (k, w) in q.weights().iter().enumerate() {
            let block: f64 = p.weights()[k << c..(k + 1) << c].iter().sum();
            prop_assert!((w - block).abs() < 1e-12);
        }
    }
}

#[test]
fn three_by_three_kernel_matches_double_loop() {
    let mut rng = SeededRng::new(11);
    let kernel = random_kernel(3, 3, &mut rng);
    let p = random_probability(3, &mut rng);
    let q = apply_channel(&kernel, &p).unwrap();
    for x in 0..3 {
        let mut expected = 0.0;
        for z in 0..3 {
            expected += kernel.rows()[z].get(x) * p.get(z);
        }
        assert!((q.get(x) - expected).abs() < 1e-15);
    }
}

fn bump(len: usize, center: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|i| (-((i as f64 - center as f64) / 3.0).powi(2)).exp()).collect();
    FiniteProbability::renormalized(raw).unwrap().weights().to_vec()
}

#[test]
fn gaussian_smoothing_is_translation_covariant() {
    let spacing = 0.1;
    let sigma = 4.0 * spacing;
    let a = GridProbability1D::new(0.0, spacing, bump(200, 80)).unwrap();
    let b = GridProbability1D::new(0.0, spacing, bump(200, 100)).unwrap();
    let (sa, sb) = (gaussian_convolve(&a, sigma).unwrap(), gaussian_convolve(&b, sigma).unwrap());
    for i in 40..140 {
        assert!((sa.weights()[i] - sb.weights()[i + 20]).abs() < 1e-12);
    }
}

#[test]
fn gaussian_smoothing_adds_variance() {
    let spacing = 0.05;
    let sigma = 4.0 * spacing;
    let p = GridProbability1D::new(-5.0, spacing, bump(200, 100)).unwrap();
    let smoothed = gaussian_convolve(&p, sigma).unwrap();
    assert!((smoothed.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((smoothed.mean() - p.mean()).abs() < 1e-9);
    let expected = p.variance() + sigma * sigma;
    assert!((smoothed.variance() - expected).abs() / expected < 0.02, "{} vs {expected}", smoothed.variance());
}

#[test]
fn coarsening_loses_self_information_under_length_model() {
    let mut cfg = ExperimentConfig::for_experiment(ExperimentKind::Conservation);
    cfg.model = ModelKind::Length;
    cfg.qubits = vec![6];
    cfg.coarseness = vec![1, 2, 3];
    cfg.samples = 60;
    cfg.channel = ChannelSpec::Coarsen;
    for row in exp_channel_conservation(&cfg, &LengthModel).unwrap() {
        assert!(row.estimate_bits <= 0.0, "c = {:?}: median {}", row.c, row.estimate_bits);
    }
}
