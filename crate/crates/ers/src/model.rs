//! Model contracts: weighted proposal bundles and their analytic bounds.
//!
//! A [`FeynmanKac`] implementation describes an unnormalized path
//! distribution over a horizon of `T` steps through three ingredients:
//! per-step proposal samplers, log incremental weights, and upper bounds
//! that dominate those weights everywhere. The samplers and weights drive
//! the ensemble kernels; the bounds are what make exact rejection possible,
//! so they must be genuine suprema, not estimates.
//!
//! Time is 1-based: step `1` carries the initial weight, steps `2..=T`
//! carry transition weights. All weights are handled on the log scale with
//! `-inf` standing in for an exact zero.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::rng::RngStream;

/// Construction-time validation failures for models and targets.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{name} must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("observation sequence must not be empty")]
    NoObservations,
    #[error("observation {index} is zero; the volatility proposal requires nonzero values")]
    ZeroObservation { index: usize },
    #[error("weight table invalid: {0}")]
    InvalidTable(String),
}

/// A sequential target: proposals, log incremental weights, and bounds.
///
/// Implementors provide [`log_transition_weight_from_input`] together with
/// an optional [`transition_input`] transform of the previous state. The
/// split lets the kernels apply any expensive per-state transform (a drift
/// function, say) once per grid column instead of once per state pair. The
/// plain pairwise weight is always
/// `log_transition_weight_from_input(t, transition_input(t, prev), next)`,
/// and the provided `log_transition_weight` is exactly that composition.
///
/// [`log_transition_weight_from_input`]: FeynmanKac::log_transition_weight_from_input
/// [`transition_input`]: FeynmanKac::transition_input
pub trait FeynmanKac: Send + Sync {
    /// Number of time steps `T >= 1`.
    fn horizon(&self) -> usize;

    /// Log weight of step 1 at state `x`; `-inf` encodes a zero weight.
    fn log_initial_weight(&self, x: f64) -> f64;

    /// Per-state transform of the previous state, applied once per column.
    fn transition_input(&self, t: usize, prev: f64) -> f64 {
        let _ = t;
        prev
    }

    /// Log weight of the transition into step `t` (`2 <= t <= T`), given
    /// the transformed previous state.
    fn log_transition_weight_from_input(&self, t: usize, prev_input: f64, next: f64) -> f64;

    /// Log weight of the transition `prev -> next` into step `t`.
    fn log_transition_weight(&self, t: usize, prev: f64, next: f64) -> f64 {
        self.log_transition_weight_from_input(t, self.transition_input(t, prev), next)
    }

    /// Draws one state from the step-`t` proposal (`1 <= t <= T`).
    fn sample_proposal(&self, t: usize, rng: &mut RngStream) -> f64;

    /// Log upper bound dominating `log_initial_weight` everywhere.
    fn log_initial_bound(&self) -> f64;

    /// Log upper bound dominating every step-`t` transition weight.
    fn log_transition_bound(&self, t: usize) -> f64;

    /// Log bound on step-`t` weights out of `prev`, i.e. over all `next`.
    ///
    /// Defaults to the constant step bound; override when a tighter
    /// closed-form supremum is available.
    fn log_transition_bound_from(&self, t: usize, prev: f64) -> f64 {
        let _ = prev;
        self.log_transition_bound(t)
    }

    /// Log bound on step-`t` weights into `next`, i.e. over all `prev`.
    fn log_transition_bound_into(&self, t: usize, next: f64) -> f64 {
        let _ = next;
        self.log_transition_bound(t)
    }

    /// Global log lower bound on every incremental weight, when one exists.
    ///
    /// Feeds the acceptance-rate guarantee in
    /// [`theory_bounds`](crate::dynamic::theory_bounds); sampling never
    /// needs it.
    fn log_weight_floor(&self) -> Option<f64> {
        None
    }

    /// Log density of the step-`t` proposal at `x`, when computable.
    ///
    /// Only diagnostics (the dense-grid oracle) require it.
    fn log_proposal_density(&self, t: usize, x: f64) -> Option<f64> {
        let _ = (t, x);
        None
    }
}

/// Evaluates `log_initial_weight` and asserts domination in debug builds.
#[inline(always)]
pub(crate) fn checked_initial_weight<M: FeynmanKac + ?Sized>(model: &M, x: f64) -> f64 {
    let lw = model.log_initial_weight(x);
    debug_assert!(
        lw <= model.log_initial_bound(),
        "initial weight {lw} exceeds its bound {} at x={x}",
        model.log_initial_bound()
    );
    lw
}

/// Evaluates the transformed transition weight and asserts domination.
#[inline(always)]
pub(crate) fn checked_transition_from_input<M: FeynmanKac + ?Sized>(
    model: &M,
    t: usize,
    prev_input: f64,
    next: f64,
) -> f64 {
    let lw = model.log_transition_weight_from_input(t, prev_input, next);
    debug_assert!(
        lw <= model.log_transition_bound(t),
        "transition weight {lw} exceeds its step bound {} at t={t}",
        model.log_transition_bound(t)
    );
    lw
}

/// A path's total incremental weight on both scales.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathWeight {
    /// Sum of log incremental weights; `-inf` when any factor is zero.
    pub log: f64,
    /// `exp(log)`: the plain product, which may underflow to zero for long
    /// horizons even when `log` is perfectly informative.
    pub linear: f64,
}

/// Total incremental weight of `path` under `model`.
///
/// `path` must have exactly `model.horizon()` entries.
pub fn evaluate_path_weight<M: FeynmanKac + ?Sized>(model: &M, path: &[f64]) -> PathWeight {
    assert_eq!(
        path.len(),
        model.horizon(),
        "path length {} does not match horizon {}",
        path.len(),
        model.horizon()
    );
    let mut log = checked_initial_weight(model, path[0]);
    for t in 2..=model.horizon() {
        let (prev, next) = (path[t - 2], path[t - 1]);
        let lw = model.log_transition_weight(t, prev, next);
        debug_assert!(lw <= model.log_transition_bound(t));
        debug_assert!(lw <= model.log_transition_bound_from(t, prev));
        debug_assert!(lw <= model.log_transition_bound_into(t, next));
        log += lw;
    }
    PathWeight { log, linear: log.exp() }
}

/// The step-`t` partial bound functions the bound recursion will use.
///
/// Returns log-scale `(out_of_prev, into_next)` bounds: the model's own
/// overrides when it has them, otherwise two constants equal to the step
/// bound. Panics when `t` is outside `2..=horizon`.
pub fn effective_partial_bounds<M: FeynmanKac + ?Sized>(
    model: &M,
    t: usize,
) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
    assert!(
        (2..=model.horizon()).contains(&t),
        "partial bounds exist for steps 2..={}, got t={t}",
        model.horizon()
    );
    (
        move |prev: f64| model.log_transition_bound_from(t, prev),
        move |next: f64| model.log_transition_bound_into(t, next),
    )
}

/// A single-variable target for plain and ensemble rejection sampling.
///
/// Carries the unnormalized density, a proposal sampler, the importance
/// weight `density / proposal density`, and a finite upper bound on that
/// weight. Immutable after construction and shareable across threads.
pub struct StaticTarget {
    density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    sampler: Box<dyn Fn(&mut RngStream) -> f64 + Send + Sync>,
    weight: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: f64,
}

impl StaticTarget {
    /// Builds a target; `bound` must be positive and finite.
    pub fn new(
        density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        sampler: Box<dyn Fn(&mut RngStream) -> f64 + Send + Sync>,
        weight: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        bound: f64,
    ) -> Result<Self, ModelError> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "bound",
                requirement: "positive and finite",
                value: bound,
            });
        }
        Ok(StaticTarget { density, sampler, weight, bound })
    }

    /// The canonical two-state test target.
    ///
    /// States `0.0` and `1.0` carry unnormalized masses `1` and `1/2`; the
    /// proposal is uniform over the two states, so the weights are `2` and
    /// `1` with bound `2`. Plain rejection accepts with probability `3/4`,
    /// and every quantity of interest is enumerable by hand, which makes
    /// this the reference target for exactness tests.
    pub fn two_point() -> Self {
        StaticTarget::new(
            Box::new(|x| if x == 0.0 { 1.0 } else { 0.5 }),
            Box::new(|rng: &mut RngStream| if rng.uniform() < 0.5 { 0.0 } else { 1.0 }),
            Box::new(|x| if x == 0.0 { 2.0 } else { 1.0 }),
            2.0,
        )
        .expect("two-point bound is valid")
    }

    /// Unnormalized target density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    /// One proposal draw.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        (self.sampler)(rng)
    }

    /// Importance weight at `x`, asserted against the bound in debug builds.
    pub fn weight(&self, x: f64) -> f64 {
        let w = (self.weight)(x);
        debug_assert!(
            (0.0..=self.bound).contains(&w),
            "weight {w} outside [0, {}] at x={x}",
            self.bound
        );
        w
    }

    /// The finite weight bound.
    pub fn bound(&self) -> f64 {
        self.bound
    }
}

/// Outcome of a repeated-trial sampling loop.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleOutcome<T> {
    /// A trial accepted after `trials` attempts (counting the accepting one).
    Accepted { value: T, trials: u64 },
    /// The trial budget ran out without an acceptance.
    Exhausted { trials: u64 },
}

impl<T> SampleOutcome<T> {
    /// Number of trials consumed.
    pub fn trials(&self) -> u64 {
        match self {
            SampleOutcome::Accepted { trials, .. } | SampleOutcome::Exhausted { trials } => *trials,
        }
    }

    /// The accepted value, if any.
    pub fn value(&self) -> Option<&T> {
        match self {
            SampleOutcome::Accepted { value, .. } => Some(value),
            SampleOutcome::Exhausted { .. } => None,
        }
    }

    /// Consumes the outcome, yielding the accepted value if any.
    pub fn into_value(self) -> Option<T> {
        match self {
            SampleOutcome::Accepted { value, .. } => Some(value),
            SampleOutcome::Exhausted { .. } => None,
        }
    }

    /// Whether a value was accepted.
    pub fn is_accepted(&self) -> bool {
        matches!(self, SampleOutcome::Accepted { .. })
    }
}

/// Wrapper that counts weight evaluations on an inner model.
///
/// Counts one transition evaluation per call to
/// `log_transition_weight_from_input` (the kernels' evaluation path) and
/// one initial evaluation per `log_initial_weight`. Bound lookups are not
/// counted. Useful for verifying kernel complexity and for cost profiling.
pub struct CountingModel<M> {
    inner: M,
    initial: AtomicU64,
    transition: AtomicU64,
}

impl<M> CountingModel<M> {
    pub fn new(inner: M) -> Self {
        CountingModel { inner, initial: AtomicU64::new(0), transition: AtomicU64::new(0) }
    }

    /// `(initial, transition)` evaluation counts since the last reset.
    pub fn counts(&self) -> (u64, u64) {
        (self.initial.load(Ordering::Relaxed), self.transition.load(Ordering::Relaxed))
    }

    pub fn reset(&self) {
        self.initial.store(0, Ordering::Relaxed);
        self.transition.store(0, Ordering::Relaxed);
    }

    pub fn into_inner(self) -> M {
        self.inner
    }
}

impl<M: FeynmanKac> FeynmanKac for CountingModel<M> {
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn log_initial_weight(&self, x: f64) -> f64 {
        self.initial.fetch_add(1, Ordering::Relaxed);
        self.inner.log_initial_weight(x)
    }

    fn transition_input(&self, t: usize, prev: f64) -> f64 {
        self.inner.transition_input(t, prev)
    }

    fn log_transition_weight_from_input(&self, t: usize, prev_input: f64, next: f64) -> f64 {
        self.transition.fetch_add(1, Ordering::Relaxed);
        self.inner.log_transition_weight_from_input(t, prev_input, next)
    }

    fn sample_proposal(&self, t: usize, rng: &mut RngStream) -> f64 {
        self.inner.sample_proposal(t, rng)
    }

    fn log_initial_bound(&self) -> f64 {
        self.inner.log_initial_bound()
    }

    fn log_transition_bound(&self, t: usize) -> f64 {
        self.inner.log_transition_bound(t)
    }

    fn log_transition_bound_from(&self, t: usize, prev: f64) -> f64 {
        self.inner.log_transition_bound_from(t, prev)
    }

    fn log_transition_bound_into(&self, t: usize, next: f64) -> f64 {
        self.inner.log_transition_bound_into(t, next)
    }

    fn log_weight_floor(&self) -> Option<f64> {
        self.inner.log_weight_floor()
    }

    fn log_proposal_density(&self, t: usize, x: f64) -> Option<f64> {
        self.inner.log_proposal_density(t, x)
    }
}
