//! A Gaussian random walk conditioned to remain inside an interval.

use crate::model::{FeynmanKac, ModelError};
use crate::models::{log_normal_pdf, log_normal_peak};
use crate::rng::RngStream;

/// Random walk on an interval, conditioned to stay inside it.
///
/// The path law is: the first state uniform on the interval, each later
/// state a Gaussian step from its predecessor, and the whole path
/// conditioned on never leaving. Proposals are uniform on the interval,
/// so the first step carries unit weight and every later step carries
/// `|S| * N(x_t; x_{t-1}, sigma^2)` with `|S|` the interval length. The
/// normalizer is the probability that the free walk stays inside, which
/// shrinks exponentially with the horizon — plain rejection stalls on
/// long paths while ensembles with `n` proportional to the horizon keep
/// a stable acceptance rate.
///
/// Because proposals never leave the interval, the supremum of the step
/// weight over either endpoint alone is the Gaussian peak, the same as
/// the full bound; the gain over plain rejection comes entirely from
/// averaging over the ensemble. The weights also admit a uniform positive
/// floor (the Gaussian evaluated across the interval's diameter), so
/// [`crate::dynamic::theory_bounds`] applies.
#[derive(Clone, Debug)]
pub struct ConditionedRandomWalk {
    lo: f64,
    hi: f64,
    sigma: f64,
    horizon: usize,
    // Constants of the step weight `ln|S| + ln N(next; prev, sigma^2)`,
    // fixed at construction so the per-pair evaluation is two multiplies.
    inv_sigma: f64,
    log_step_const: f64,
    log_step_bound: f64,
    log_floor: f64,
}

impl ConditionedRandomWalk {
    /// Walk on `[0, 1]` with step scale `0.2`.
    pub fn new(horizon: usize) -> Self {
        Self::with_parameters((0.0, 1.0), 0.2, horizon).expect("default parameters are valid")
    }

    /// Walk on `support` with step standard deviation `sigma`.
    pub fn with_parameters(
        support: (f64, f64),
        sigma: f64,
        horizon: usize,
    ) -> Result<Self, ModelError> {
        let (lo, hi) = support;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ModelError::InvalidParameter {
                name: "support",
                requirement: "a finite interval with lo < hi",
                value: hi - lo,
            });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "sigma",
                requirement: "positive and finite",
                value: sigma,
            });
        }
        if horizon == 0 {
            return Err(ModelError::EmptyHorizon);
        }
        let length = hi - lo;
        let log_length = length.ln();
        // Worst factor: either the unit first-step weight or a step across
        // the interval's full diameter.
        let log_floor = (log_length + log_normal_pdf(length, 0.0, sigma)).min(0.0);
        Ok(Self {
            lo,
            hi,
            sigma,
            horizon,
            inv_sigma: 1.0 / sigma,
            log_step_const: log_length + log_normal_pdf(0.0, 0.0, sigma),
            log_step_bound: log_length + log_normal_peak(sigma),
            log_floor,
        })
    }

    /// The interval the walk is confined to.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Step standard deviation.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

impl FeynmanKac for ConditionedRandomWalk {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn log_initial_weight(&self, _x: f64) -> f64 {
        0.0
    }

    #[inline]
    fn log_transition_weight_from_input(&self, _t: usize, prev_input: f64, next: f64) -> f64 {
        let z = (next - prev_input) * self.inv_sigma;
        self.log_step_const - 0.5 * z * z
    }

    fn sample_proposal(&self, _t: usize, rng: &mut RngStream) -> f64 {
        self.lo + rng.uniform() * self.length()
    }

    fn log_initial_bound(&self) -> f64 {
        0.0
    }

    #[inline]
    fn log_transition_bound(&self, _t: usize) -> f64 {
        self.log_step_bound
    }

    fn log_weight_floor(&self) -> Option<f64> {
        Some(self.log_floor)
    }

    fn log_proposal_density(&self, _t: usize, x: f64) -> Option<f64> {
        if (self.lo..=self.hi).contains(&x) {
            Some(-self.length().ln())
        } else {
            Some(f64::NEG_INFINITY)
        }
    }
}
