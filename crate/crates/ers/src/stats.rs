//! Small statistical helpers shared by estimators, tests, and examples.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Sample mean and standard error of the mean.
///
/// A single observation gets a zero standard error; empty input panics.
pub fn mean_and_se(values: &[f64]) -> Estimate {
    assert!(!values.is_empty(), "cannot summarize an empty sample");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Estimate { mean, std_error: 0.0 };
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let variance = ss / (n - 1.0);
    Estimate { mean, std_error: (variance / n).sqrt() }
}

/// Result of a chi-square goodness-of-fit comparison.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub threshold: f64,
    pub dof: usize,
    pub passed: bool,
}

/// Chi-square test of observed counts against cell probabilities.
///
/// `expected_probs` must be strictly positive and sum to 1; callers merge
/// cells first when expectations are tiny. `alpha` is the rejection
/// probability under the null (e.g. `1e-3`).
pub fn chi_square_test(observed: &[u64], expected_probs: &[f64], alpha: f64) -> ChiSquareReport {
    assert_eq!(observed.len(), expected_probs.len());
    assert!(observed.len() >= 2, "need at least two cells");
    let total: u64 = observed.iter().sum();
    assert!(total > 0, "need at least one observation");
    let prob_sum: f64 = expected_probs.iter().sum();
    assert!(
        (prob_sum - 1.0).abs() < 1e-9,
        "cell probabilities sum to {prob_sum}, expected 1"
    );
    let mut statistic = 0.0;
    for (&obs, &p) in observed.iter().zip(expected_probs) {
        assert!(p > 0.0, "cell probabilities must be positive");
        let expected = p * total as f64;
        statistic += (obs as f64 - expected).powi(2) / expected;
    }
    let dof = observed.len() - 1;
    let threshold = chi_square_threshold(dof, alpha);
    ChiSquareReport { statistic, threshold, dof, passed: statistic <= threshold }
}

/// Upper `alpha` critical value of the chi-square distribution.
pub fn chi_square_threshold(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("dof >= 1")
        .inverse_cdf(1.0 - alpha)
}

/// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
///
/// Sorts `sample` in place.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!sample.is_empty());
    sample.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic Kolmogorov-Smirnov critical value at level `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}
