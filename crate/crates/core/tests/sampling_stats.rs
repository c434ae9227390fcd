use qsignal::measurement::block_pvm;
use qsignal::quantum::{purity, CMatrix, C64};
use qsignal::sampling::{
    biased_prior_draw, biased_prior_sample, collapsed_sample, collapsed_sample_with, first_weight_upper_quantile,
    haar_pure, mixed_state, simplex_weights, MixtureSpec, SeededRng, SimplexLaw,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const N: usize = 10_000;

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn haar_statistic_is_unitarily_invariant() {
    // Statistic |⟨0|ψ⟩|², with and without a fixed Hadamard-phase unitary applied afterwards.
    let n = 2;
    let h = 0.5;
    let u = CMatrix::from_fn(4, 4, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        C64::new(0.0, sign * h) * if i == 3 { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) }
    });
    let mut plain_rng = SeededRng::new(1);
    let mut rotated_rng = SeededRng::new(2);
    let plain: Vec<f64> = (0..N).map(|_| haar_pure(n, &mut plain_rng).amplitudes()[0].norm_sqr()).collect();
    let rotated: Vec<f64> =
        (0..N).map(|_| haar_pure(n, &mut rotated_rng).apply(&u).unwrap().amplitudes()[0].norm_sqr()).collect();
    let d = ks_statistic(plain, rotated);
    // Critical value at significance 0.01: 1.628 · sqrt(2/N).
    assert!(d < 1.628 * (2.0 / N as f64).sqrt(), "KS statistic {d}");
}

#[test]
fn single_qubit_weight_has_mean_one_half() {
    let mut rng = SeededRng::new(3);
    let w: Vec<f64> = (0..N).map(|_| haar_pure(1, &mut rng).amplitudes()[0].norm_sqr()).collect();
    let (mean, se) = mean_and_se(&w);
    assert!((mean - 0.5).abs() < 3.0 * se, "{mean} ± {se}");
}

#[test]
fn dirichlet_components_average_one_quarter() {
    let mut rng = SeededRng::new(4);
    let spec = MixtureSpec::new(4, SimplexLaw::default()).unwrap();
    let draws: Vec<Vec<f64>> = (0..N).map(|_| simplex_weights(&spec, &mut rng).unwrap()).collect();
    for k in 0..4 {
        let column: Vec<f64> = draws.iter().map(|w| w[k]).collect();
        let (mean, se) = mean_and_se(&column);
        assert!((mean - 0.25).abs() < 3.0 * se, "component {k}: {mean} ± {se}");
    }
}

#[test]
fn mixtures_have_unit_trace_and_single_components_are_pure() {
    let mut rng = SeededRng::new(5);
    for law in [SimplexLaw::Equal, SimplexLaw::Dirichlet { concentration: 0.5 }] {
        let rho = mixed_state(3, &MixtureSpec::new(3, law).unwrap(), &mut rng).unwrap();
        let trace: f64 = rho.diagonal().iter().sum();
        assert!((trace - 1.0).abs() < 1e-9);
    }
    let rho = mixed_state(3, &MixtureSpec::new(1, SimplexLaw::default()).unwrap(), &mut rng).unwrap();
    assert!((purity(&rho) - 1.0).abs() < 1e-9);
}

#[test]
fn collapse_outcomes_are_uniform_over_blocks() {
    let (n, c) = (6, 2);
    let pvm = block_pvm(n, c).unwrap();
    let mut rng = SeededRng::new(6);
    let mut counts = [0usize; 16];
    for _ in 0..N {
        counts[collapsed_sample_with(&pvm, n, &mut rng).unwrap().1] += 1;
    }
    let expected = N as f64 / 16.0;
    let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(15.0).unwrap().inverse_cdf(0.99);
    assert!(chi2 < critical, "chi-square {chi2} ≥ {critical}");
}

#[test]
fn collapsed_states_stay_inside_their_block() {
    let mut rng = SeededRng::new(7);
    for _ in 0..200 {
        let (state, k) = collapsed_sample(5, 2, &mut rng).unwrap();
        for (i, a) in state.amplitudes().iter().enumerate() {
            if i / 4 != k {
                assert_eq!(a.norm(), 0.0);
            }
        }
    }
}

#[test]
fn median_split_prior_accepts_half() {
    let n = 3;
    let median = first_weight_upper_quantile(n, 0.5);
    let weight = |psi: &qsignal::quantum::PureState| if psi.amplitudes()[0].norm_sqr() > median { 2.0 } else { 0.0 };
    let mut rng = SeededRng::new(8);
    let attempts: u64 = (0..N).map(|_| biased_prior_draw(n, 1.0, weight, &mut rng).unwrap().attempts).sum();
    let rate = N as f64 / attempts as f64;
    let se = (0.25 / attempts as f64).sqrt();
    assert!((rate - 0.5).abs() < 3.0 * se, "acceptance {rate} ± {se}");
}

#[test]
fn samplers_are_deterministic() {
    let spec = MixtureSpec::new(3, SimplexLaw::default()).unwrap();
    let run = |seed| {
        let mut rng = SeededRng::new(seed);
        (
            haar_pure(3, &mut rng),
            mixed_state(2, &spec, &mut rng).unwrap(),
            collapsed_sample(4, 1, &mut rng).unwrap(),
            biased_prior_sample(3, 1.0, |_: &qsignal::quantum::PureState| 1.5, &mut rng).unwrap(),
        )
    };
    assert_eq!(run(42), run(42));
    assert_ne!(run(42).0, run(43).0);
}
