//! A tanh-drift autoregression observed in Gaussian noise.

use crate::model::{FeynmanKac, ModelError};
use crate::models::{log_normal_pdf, log_normal_peak};
use crate::rng::RngStream;

/// Posterior path sampling for a bounded-drift autoregression.
///
/// The latent chain starts standard normal and evolves as
/// `X_t = phi * tanh(X_{t-1}) + V_t` with `V_t ~ N(0, sigma_v^2)`; each
/// state is observed as `Y_t = X_t + W_t` with `W_t ~ N(0, sigma_w^2)`.
/// Given observations, proposals draw `X_t ~ N(y_t, sigma_w^2)` — the
/// likelihood reshaped as a density in the state — which cancels the
/// likelihood factor exactly, leaving the transition density itself as
/// the incremental weight.
///
/// The tanh drift keeps every step mean inside `[-|phi|, |phi|]`, which
/// gives a nontrivial partial bound: the weight into a fixed next state
/// `x` can never exceed the step density evaluated at the gap between `x`
/// and that interval. States far outside the drift range are therefore
/// penalized in the envelope as well as in the weights, tightening the
/// acceptance ratio.
#[derive(Clone, Debug)]
pub struct NonlinearAr {
    phi: f64,
    sigma_v: f64,
    sigma_w: f64,
    observations: Vec<f64>,
    // Step-density constants, fixed at construction to keep the per-pair
    // weight evaluation down to two multiplies.
    inv_sigma_v: f64,
    log_step_const: f64,
    log_step_bound: f64,
}

impl NonlinearAr {
    /// Standard parameters: `phi = 0.9`, `sigma_v = 0.3`, `sigma_w = 0.1`.
    pub fn new(observations: Vec<f64>) -> Result<Self, ModelError> {
        Self::with_parameters(0.9, 0.3, 0.1, observations)
    }

    pub fn with_parameters(
        phi: f64,
        sigma_v: f64,
        sigma_w: f64,
        observations: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if !phi.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "phi",
                requirement: "finite",
                value: phi,
            });
        }
        for (name, value) in [("sigma_v", sigma_v), ("sigma_w", sigma_w)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::InvalidParameter {
                    name,
                    requirement: "positive and finite",
                    value,
                });
            }
        }
        if observations.is_empty() {
            return Err(ModelError::NoObservations);
        }
        if let Some(bad) = observations.iter().find(|y| !y.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "observation",
                requirement: "finite",
                value: *bad,
            });
        }
        Ok(Self {
            phi,
            sigma_v,
            sigma_w,
            observations,
            inv_sigma_v: 1.0 / sigma_v,
            log_step_const: log_normal_pdf(0.0, 0.0, sigma_v),
            log_step_bound: log_normal_peak(sigma_v),
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    pub fn sigma_w(&self) -> f64 {
        self.sigma_w
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    fn observation(&self, t: usize) -> f64 {
        self.observations[t - 1]
    }
}

impl FeynmanKac for NonlinearAr {
    fn horizon(&self) -> usize {
        self.observations.len()
    }

    fn log_initial_weight(&self, x: f64) -> f64 {
        log_normal_pdf(x, 0.0, 1.0)
    }

    /// The step mean `phi * tanh(prev)`, hoisted so the quadratic kernels
    /// evaluate the tanh once per candidate instead of once per pair.
    fn transition_input(&self, _t: usize, prev: f64) -> f64 {
        self.phi * prev.tanh()
    }

    #[inline]
    fn log_transition_weight_from_input(&self, _t: usize, prev_input: f64, next: f64) -> f64 {
        let z = (next - prev_input) * self.inv_sigma_v;
        self.log_step_const - 0.5 * z * z
    }

    fn sample_proposal(&self, t: usize, rng: &mut RngStream) -> f64 {
        self.observation(t) + self.sigma_w * rng.normal()
    }

    fn log_initial_bound(&self) -> f64 {
        log_normal_peak(1.0)
    }

    #[inline]
    fn log_transition_bound(&self, _t: usize) -> f64 {
        self.log_step_bound
    }

    #[inline]
    fn log_transition_bound_into(&self, _t: usize, next: f64) -> f64 {
        // The step mean ranges over (-|phi|, |phi|); the density at `next`
        // is largest when the mean sits as close as possible.
        let gap = (next.abs() - self.phi.abs()).max(0.0);
        let z = gap * self.inv_sigma_v;
        self.log_step_const - 0.5 * z * z
    }

    fn log_proposal_density(&self, t: usize, x: f64) -> Option<f64> {
        Some(log_normal_pdf(x, self.observation(t), self.sigma_w))
    }
}
