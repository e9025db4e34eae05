//! Ensemble rejection sampling for whole paths.
//!
//! One trial draws an [`EnsembleGrid`], estimates the normalizer with the
//! forward pass, selects a grid path backwards in proportion to its weight,
//! computes the dominating envelope for that selection, and accepts the
//! path with probability `z_hat / z_bar`. Accepted paths are exact draws
//! from the model's normalized path law; the trial costs `O(n^2 T)` and
//! its acceptance probability approaches one as `n` grows with the
//! horizon.
//!
//! Everything runs in log space: `T`-step weight products underflow `f64`
//! long before horizons of practical interest.

use crate::ensemble::{backward_sample, bounding_recursion, forward_filter, EnsembleGrid};
use crate::model::{FeynmanKac, SampleOutcome};
use crate::rng::{RngStream, LABEL_ACCEPT};
use rayon::prelude::*;

/// Everything observable about one path-sampling trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    /// Log of the forward-pass normalizer estimate; `-inf` when degenerate.
    pub log_z_hat: f64,
    /// Log of the dominating envelope for the selected path; reported as
    /// `+inf` on degenerate trials, where nothing was selected.
    pub log_z_bar: f64,
    /// Acceptance probability `exp(log_z_hat - log_z_bar)`, clamped to one
    /// to absorb roundoff from reassociated sums.
    pub ratio: f64,
    /// Whether the acceptance coin landed under `ratio`.
    pub accepted: bool,
    /// True when some step of the grid carried no weight at all, so no
    /// path could be selected and the trial rejected outright.
    pub degenerate: bool,
    /// Stream id of the `RngStream` that drove the trial.
    pub stream_id: u64,
}

/// Result of a repeated path-sampling loop.
#[derive(Clone, Debug)]
pub struct DynamicSampleResult {
    pub outcome: SampleOutcome<Vec<f64>>,
    pub records: Vec<TrialRecord>,
}

/// Runs one ensemble trial with `n` candidates per step.
///
/// Returns the selected path (even when the trial is rejected) together
/// with the trial record. The trial is a pure function of
/// `(model, n, rng)`: grid columns, path selection, and the acceptance
/// coin come from fixed substreams of `rng`, so repeated calls reproduce
/// each other and callers can run trials concurrently on distinct
/// stream ids.
pub fn ers_trial<M: FeynmanKac + ?Sized>(
    model: &M,
    n: usize,
    rng: &RngStream,
) -> (Option<Vec<f64>>, TrialRecord) {
    let grid = EnsembleGrid::sample(model, n, rng);
    let filter = forward_filter(model, &grid);
    if filter.degenerate_step().is_some() {
        let record = TrialRecord {
            log_z_hat: f64::NEG_INFINITY,
            log_z_bar: f64::INFINITY,
            ratio: 0.0,
            accepted: false,
            degenerate: true,
            stream_id: rng.stream(),
        };
        return (None, record);
    }
    let draw = backward_sample(model, &grid, &filter, rng);
    let log_z_bar = bounding_recursion(model, &grid, &draw.indices);
    debug_assert!(
        filter.log_z_hat() <= log_z_bar + 1e-12 * log_z_bar.abs().max(1.0),
        "estimate {} above envelope {log_z_bar}",
        filter.log_z_hat()
    );
    let ratio = (filter.log_z_hat() - log_z_bar).min(0.0).exp();
    let accepted = rng.substream(LABEL_ACCEPT).uniform() < ratio;
    let record = TrialRecord {
        log_z_hat: filter.log_z_hat(),
        log_z_bar,
        ratio,
        accepted,
        degenerate: false,
        stream_id: rng.stream(),
    };
    (accepted.then_some(draw.path), record)
}

/// Repeats trials until one accepts or `max_trials` is exhausted.
///
/// Trial `k` runs on the substream labelled `k`; `None` means no budget
/// limit. Records of every trial run are returned alongside the outcome.
pub fn ers_sample<M: FeynmanKac + ?Sized>(
    model: &M,
    n: usize,
    rng: &RngStream,
    max_trials: Option<u64>,
) -> DynamicSampleResult {
    let mut records = Vec::new();
    let mut trials = 0u64;
    loop {
        if max_trials.is_some_and(|cap| trials >= cap) {
            return DynamicSampleResult { outcome: SampleOutcome::Exhausted { trials }, records };
        }
        let (path, record) = ers_trial(model, n, &rng.substream(trials));
        trials += 1;
        records.push(record);
        if let Some(value) = path {
            return DynamicSampleResult { outcome: SampleOutcome::Accepted { value, trials }, records };
        }
    }
}

/// One classic rejection trial on the whole path.
///
/// Draws each step's value from the same per-step substreams an
/// [`EnsembleGrid`] with `n = 1` would use, weighs the path, and accepts
/// with probability `weight / envelope`, where the envelope is the product
/// of the per-step bounds. On a shared `rng` this trial and the `n = 1`
/// ensemble trial see identical draws and produce identical records.
pub fn standard_rs_trial<M: FeynmanKac + ?Sized>(
    model: &M,
    rng: &RngStream,
) -> (Option<Vec<f64>>, TrialRecord) {
    let horizon = model.horizon();
    assert!(horizon > 0, "model horizon must be positive");
    let mut path = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        path.push(model.sample_proposal(t, &mut rng.substream(t as u64)));
    }
    // Fold orders mirror the ensemble passes exactly so that the n = 1
    // grid reduces to this trial bit for bit.
    let mut log_weight = 0.0;
    log_weight += model.log_initial_weight(path[0]);
    for t in 2..=horizon {
        log_weight += model.log_transition_weight(t, path[t - 2], path[t - 1]);
    }
    if log_weight == f64::NEG_INFINITY {
        let record = TrialRecord {
            log_z_hat: f64::NEG_INFINITY,
            log_z_bar: f64::INFINITY,
            ratio: 0.0,
            accepted: false,
            degenerate: true,
            stream_id: rng.stream(),
        };
        return (None, record);
    }
    let mut log_envelope = 0.0;
    log_envelope += model.log_initial_bound();
    for t in 2..=horizon {
        log_envelope += model.log_transition_bound(t);
    }
    let ratio = (log_weight - log_envelope).min(0.0).exp();
    let accepted = rng.substream(LABEL_ACCEPT).uniform() < ratio;
    let record = TrialRecord {
        log_z_hat: log_weight,
        log_z_bar: log_envelope,
        ratio,
        accepted,
        degenerate: false,
        stream_id: rng.stream(),
    };
    (accepted.then_some(path), record)
}

/// Acceptance-rate estimate over independent trials.
#[derive(Clone, Copy, Debug)]
pub struct AcceptanceEstimate {
    /// Mean of the per-trial `z_hat / z_bar` ratios. This is the
    /// lower-variance estimator: each ratio is the trial's conditional
    /// acceptance probability, so the coin flips average out analytically.
    pub mean_ratio: f64,
    /// Standard error of `mean_ratio`.
    pub std_error: f64,
    /// Fraction of trials whose acceptance coin actually landed.
    pub frequency: f64,
    /// Binomial standard error of `frequency`.
    pub frequency_std_error: f64,
    /// Number of trials run.
    pub num_samples: u64,
    /// How many of them were degenerate (they count as rejections).
    pub degenerate: u64,
}

/// Estimates the acceptance probability of size-`n` trials on `model`.
///
/// Trial `k` runs on `rng.substream(k)` and the results are folded in
/// index order, so the estimate is identical however many worker threads
/// the surrounding rayon pool provides.
pub fn estimate_acceptance<M: FeynmanKac + ?Sized>(
    model: &M,
    n: usize,
    num_samples: u64,
    rng: &RngStream,
) -> AcceptanceEstimate {
    assert!(num_samples >= 2, "need at least two samples for a standard error");
    let outcomes: Vec<(f64, bool, bool)> = (0..num_samples)
        .into_par_iter()
        .map(|k| {
            let (_, record) = ers_trial(model, n, &rng.substream(k));
            (record.ratio, record.accepted, record.degenerate)
        })
        .collect();

    let m = num_samples as f64;
    let mean_ratio = outcomes.iter().map(|&(r, _, _)| r).sum::<f64>() / m;
    let var = outcomes
        .iter()
        .map(|&(r, _, _)| (r - mean_ratio) * (r - mean_ratio))
        .sum::<f64>()
        / (m - 1.0);
    let accepted = outcomes.iter().filter(|&&(_, a, _)| a).count() as f64;
    let degenerate = outcomes.iter().filter(|&&(_, _, d)| d).count() as u64;
    let frequency = accepted / m;
    AcceptanceEstimate {
        mean_ratio,
        std_error: (var / m).sqrt(),
        frequency,
        frequency_std_error: (frequency * (1.0 - frequency) / m).sqrt(),
        num_samples,
        degenerate,
    }
}

/// Acceptance guarantees available when the model's weights admit a
/// uniform positive floor.
#[derive(Clone, Copy, Debug)]
pub struct TheoryBounds {
    /// Squared ratio of the largest step bound to the weight floor.
    pub delta: f64,
    /// Guaranteed minimum acceptance probability of one trial,
    /// `(1 + (delta - 1) / n)^{-T}`; zero if it underflows.
    pub lower_bound: f64,
    /// The same guarantee in log form, which stays informative when
    /// `delta` is large enough to underflow the linear value.
    pub log_lower_bound: f64,
}

/// Lower bound on the acceptance probability of size-`n` trials.
///
/// Requires the model to declare a positive weight floor; returns `None`
/// otherwise. Keeping `n` proportional to the horizon pins the bound:
/// as both grow with `n = beta * T`, it converges to
/// `exp(-(delta - 1) / beta)`, so linear-in-horizon ensembles keep a
/// horizon-independent acceptance rate.
pub fn theory_bounds<M: FeynmanKac + ?Sized>(model: &M, n: usize) -> Option<TheoryBounds> {
    assert!(n >= 1, "ensemble size must be at least 1");
    let floor = model.log_weight_floor()?;
    if floor == f64::NEG_INFINITY {
        return None;
    }
    let horizon = model.horizon();
    let mut log_peak = model.log_initial_bound();
    for t in 2..=horizon {
        log_peak = log_peak.max(model.log_transition_bound(t));
    }
    let log_delta = 2.0 * (log_peak - floor);
    debug_assert!(log_delta >= 0.0, "the floor cannot exceed the peak bound");

    // ln(delta - 1), written to survive both delta near one and huge delta.
    let log_delta_minus_one = log_delta + (-(-log_delta).exp_m1()).ln();
    let r = log_delta_minus_one - (n as f64).ln();
    // ln(1 + exp(r)) without overflow.
    let log_one_plus = if r > 35.0 { r } else { r.exp().ln_1p() };
    let log_lower_bound = -(horizon as f64) * log_one_plus;
    Some(TheoryBounds {
        delta: log_delta.exp(),
        lower_bound: log_lower_bound.exp(),
        log_lower_bound,
    })
}
