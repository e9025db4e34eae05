//! Ensemble rejection sampling for a single variable.
//!
//! One trial draws `n` proposals, selects one of them with probability
//! proportional to its importance weight, and accepts the selection with
//! probability `z_hat / z_bar`, where `z_hat` is the average weight of the
//! ensemble and `z_bar` is the same average with the selected weight
//! replaced by the bound. Accepted states are exact draws from the target,
//! and the acceptance probability grows from the plain rejection rate at
//! `n = 1` towards one as `n` grows.
//!
//! Weights stay on the linear scale here: a single variable cannot
//! underflow the way a long path product can, and linear arithmetic keeps
//! `z_hat <= z_bar` exact rather than approximate. `z_bar` is computed by
//! re-folding the weight sum with the bound substituted in place of the
//! selected weight, so both estimates round identically at every other
//! index.

use crate::model::{SampleOutcome, StaticTarget};
use crate::numeric::sample_categorical;
use crate::rng::{RngStream, LABEL_ACCEPT, LABEL_SELECT};
use crate::stats::{mean_and_se, Estimate};

/// Stream label for the proposal draws of a static trial.
const LABEL_PROPOSALS: u64 = 1;

/// Everything observable about one static trial.
#[derive(Clone, Copy, Debug)]
pub struct StaticTrialRecord {
    /// Average ensemble weight; an unbiased estimate of the normalizer.
    pub z_hat: f64,
    /// Dominating estimate with the selected weight replaced by the bound.
    pub z_bar: f64,
    /// Acceptance probability `z_hat / z_bar` (zero when all weights vanish).
    pub ratio: f64,
    /// Whether the acceptance coin landed under `ratio`.
    pub accepted: bool,
    /// Index of the selected proposal; `None` when every weight was zero.
    pub selected_index: Option<usize>,
}

/// Result of a repeated static sampling loop.
#[derive(Clone, Debug)]
pub struct StaticSampleResult {
    pub outcome: SampleOutcome<f64>,
    pub records: Vec<StaticTrialRecord>,
}

/// Runs one ensemble trial of size `n`.
///
/// Returns the selected state (even when the trial is rejected) together
/// with the trial record. The trial is a pure function of
/// `(target, n, rng)`: proposals, selection, and the acceptance coin come
/// from fixed substreams, so repeated calls reproduce each other and
/// callers can run trials concurrently on distinct stream ids.
pub fn static_ers_trial(
    target: &StaticTarget,
    n: usize,
    rng: &RngStream,
) -> (Option<f64>, StaticTrialRecord) {
    assert!(n >= 1, "ensemble size must be at least 1");
    let mut proposals = rng.substream(LABEL_PROPOSALS);
    let mut states = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        let x = target.sample(&mut proposals);
        states.push(x);
        weights.push(target.weight(x));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        // No mass anywhere: nothing can be selected, the trial is rejected.
        // The bound substitution is independent of the selection here.
        let record = StaticTrialRecord {
            z_hat: 0.0,
            z_bar: target.bound() / n as f64,
            ratio: 0.0,
            accepted: false,
            selected_index: None,
        };
        return (None, record);
    }

    let u_select = rng.substream(LABEL_SELECT).uniform();
    let k = sample_categorical(&weights, u_select).expect("positive total weight");

    // Summing the substituted sequence in the same index order keeps
    // z_hat <= z_bar exact: the folds differ in one term only, and that
    // term only grows.
    let substituted: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| if i == k { target.bound() } else { w })
        .sum();
    let z_hat = total / n as f64;
    let z_bar = substituted / n as f64;
    let ratio = z_hat / z_bar;
    debug_assert!(z_hat <= z_bar && (0.0..=1.0).contains(&ratio));

    let accepted = rng.substream(LABEL_ACCEPT).uniform() < ratio;
    let record =
        StaticTrialRecord { z_hat, z_bar, ratio, accepted, selected_index: Some(k) };
    (Some(states[k]), record)
}

/// Repeats trials until one accepts or `max_trials` is exhausted.
///
/// Trial `k` runs on the substream labelled `k`; `None` means no budget
/// limit. Records of every trial run are returned alongside the outcome.
pub fn static_ers_sample(
    target: &StaticTarget,
    n: usize,
    rng: &RngStream,
    max_trials: Option<u64>,
) -> StaticSampleResult {
    let mut records = Vec::new();
    let mut trials = 0u64;
    loop {
        if max_trials.is_some_and(|cap| trials >= cap) {
            return StaticSampleResult { outcome: SampleOutcome::Exhausted { trials }, records };
        }
        let (state, record) = static_ers_trial(target, n, &rng.substream(trials));
        trials += 1;
        let accepted = record.accepted;
        records.push(record);
        if accepted {
            let value = state.expect("accepted trials have a selection");
            return StaticSampleResult { outcome: SampleOutcome::Accepted { value, trials }, records };
        }
    }
}

/// One classic rejection trial: draw from the proposal, accept with
/// probability `weight / bound`.
///
/// Uses the same proposal and acceptance substreams as
/// [`static_ers_trial`], so on a shared `rng` the `n = 1` ensemble trial
/// and this trial see identical draws and decide identically.
pub fn static_rs_trial(target: &StaticTarget, rng: &RngStream) -> (f64, bool) {
    let x = target.sample(&mut rng.substream(LABEL_PROPOSALS));
    let ratio = target.weight(x) / target.bound();
    let accepted = rng.substream(LABEL_ACCEPT).uniform() < ratio;
    (x, accepted)
}

/// Classic rejection sampling: repeat trials until one accepts.
///
/// Returns the accepted state and the number of trials used. The loop has
/// no budget, so the target must give a nonzero acceptance probability.
pub fn static_rs_sample(target: &StaticTarget, rng: &RngStream) -> (f64, u64) {
    let mut trials = 0u64;
    loop {
        let (x, accepted) = static_rs_trial(target, &rng.substream(trials));
        trials += 1;
        if accepted {
            return (x, trials);
        }
    }
}

/// Mean acceptance probability over independent trials.
///
/// Averages the per-trial `z_hat / z_bar` ratios, which estimates the
/// acceptance rate with lower variance than counting accept/reject coins.
pub fn estimate_static_acceptance(
    target: &StaticTarget,
    n: usize,
    num_samples: u64,
    rng: &RngStream,
) -> Estimate {
    assert!(num_samples >= 2, "need at least two samples for a standard error");
    let ratios: Vec<f64> = (0..num_samples)
        .map(|k| static_ers_trial(target, n, &rng.substream(k)).1.ratio)
        .collect();
    mean_and_se(&ratios)
}
