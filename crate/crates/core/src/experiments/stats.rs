//! Monte Carlo summaries.

use statrs::distribution::{Binomial, DiscreteCDF};

/// `log₂` of the sample mean of `2^{value}` with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMeanEstimate {
    pub estimate_bits: f64,
    pub std_error_bits: f64,
    pub max_bits: f64,
    pub samples: usize,
}

/// Values are rescaled by `2^{-max}` before exponentiation; identical values
/// therefore return that value exactly.
pub fn log_mean_exp2(values: &[f64]) -> LogMeanEstimate {
    let samples = values.len();
    if samples == 0 {
        return LogMeanEstimate { estimate_bits: f64::NAN, std_error_bits: f64::NAN, max_bits: f64::NAN, samples };
    }
    let max_bits = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = values.iter().map(|v| (v - max_bits).exp2()).collect();
    let mean = scaled.iter().sum::<f64>() / samples as f64;
    let std_error_bits = if samples > 1 {
        let var = scaled.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        (var / samples as f64).sqrt() / (mean * std::f64::consts::LN_2)
    } else {
        0.0
    };
    LogMeanEstimate { estimate_bits: max_bits + mean.log2(), std_error_bits, max_bits, samples }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn std_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTest {
    pub negative: usize,
    pub positive: usize,
    pub ties: usize,
    /// One-sided p-value against the alternative "differences tend to be negative".
    pub p_value: f64,
}

/// Exact sign test; zero differences are dropped.
pub fn sign_test_negative(differences: &[f64]) -> SignTest {
    let negative = differences.iter().filter(|&&d| d < 0.0).count();
    let positive = differences.iter().filter(|&&d| d > 0.0).count();
    let ties = differences.len() - negative - positive;
    let trials = (negative + positive) as u64;
    let p_value = if trials == 0 || negative == 0 {
        1.0
    } else {
        let binomial = Binomial::new(0.5, trials).expect("valid binomial parameters");
        binomial.sf(negative as u64 - 1)
    };
    SignTest { negative, positive, ties, p_value }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_values_are_exact() {
        let e = log_mean_exp2(&[6.0; 17]);
        assert_eq!(e.estimate_bits, 6.0);
        assert_eq!(e.std_error_bits, 0.0);
        assert_eq!(log_mean_exp2(&[0.3]).estimate_bits, 0.3);
    }

    #[test]
    fn log_mean_of_two_values() {
        // log₂((2 + 8) / 2)
        let e = log_mean_exp2(&[1.0, 3.0]);
        assert!((e.estimate_bits - 5f64.log2()).abs() < 1e-14);
        assert_eq!(e.max_bits, 3.0);
    }

    #[test]
    fn sign_test_values() {
        // 10 negatives of 10: p = 2^-10
        let t = sign_test_negative(&[-1.0; 10]);
        assert!((t.p_value - 2f64.powi(-10)).abs() < 1e-15);
        let t = sign_test_negative(&[0.0, 0.0]);
        assert_eq!((t.ties, t.p_value), (2, 1.0));
        // 2 of 3 negative: P(X ≥ 2) = 4/8
        let t = sign_test_negative(&[-1.0, -2.0, 3.0]);
        assert!((t.p_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn median_and_slope() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!((least_squares_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-15);
    }
}
