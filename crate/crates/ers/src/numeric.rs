//! Log-space accumulation and categorical sampling primitives.
//!
//! Weights are carried as logarithms everywhere in this crate; a zero
//! weight is `-inf`. The helpers here are the only places that move
//! between the log and linear scales.

/// Terms this far below the row maximum are dropped from log-sum-exp.
///
/// `exp(-60)` is below 1e-26, so with realistic row lengths the skipped
/// mass perturbs the result by less than 1e-22 relative — far inside the
/// 1e-10 tolerance the exactness checks run at — while sparing an `exp`
/// call on most terms of strongly peaked rows.
const LOG_SUM_EXP_CUTOFF: f64 = 60.0;

/// Log of the summed exponentials of `values`.
///
/// Shift-by-max keeps the exponentials in range. Empty input and inputs
/// that are all `-inf` return `-inf`. A one-element input returns exactly
/// that element (`max + ln(1)`), which callers rely on for bit-for-bit
/// reductions to sequential products.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    debug_assert!(max.is_finite() || max == f64::INFINITY);
    let floor = max - LOG_SUM_EXP_CUTOFF;
    let mut sum = 0.0;
    for &v in values {
        if v > floor {
            sum += (v - max).exp();
        }
    }
    max + sum.ln()
}

/// Index of the first element whose cumulative weight reaches `u * total`.
///
/// This is inverse-CDF sampling with a fixed tie-break: the smallest index
/// whose running sum meets the threshold wins, so a given `(weights, u)`
/// always selects the same index. Returns `None` when the total weight is
/// zero (or not a positive finite number).
pub fn sample_categorical(weights: &[f64], u: f64) -> Option<usize> {
    debug_assert!((0.0..1.0).contains(&u));
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let threshold = u * total;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (k, &w) in weights.iter().enumerate() {
        debug_assert!(w >= 0.0, "categorical weights must be nonnegative");
        cumulative += w;
        if w > 0.0 {
            last_positive = Some(k);
            if cumulative >= threshold {
                return Some(k);
            }
        }
    }
    // Rounding can leave the final cumulative a hair under the threshold.
    last_positive
}

/// Categorical draw from unnormalized log weights.
///
/// Exponentiation is shifted by the row maximum, so any finite log scale is
/// acceptable. Returns `None` when every weight is `-inf`.
pub fn sample_categorical_from_log(log_weights: &[f64], u: f64, scratch: &mut Vec<f64>) -> Option<usize> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    scratch.clear();
    scratch.extend(log_weights.iter().map(|&v| (v - max).exp()));
    sample_categorical(scratch, u)
}
