//! A stochastic volatility chain observed through scaled returns.

use crate::model::{FeynmanKac, ModelError};
use crate::models::{log_normal_pdf, log_normal_peak};
use crate::rng::RngStream;

/// Log-volatility posterior for observed returns.
///
/// The latent log-volatility starts in its stationary law
/// `N(0, sigma^2 / (1 - phi^2))` and follows
/// `X_t = phi * X_{t-1} + sigma * V_t`; returns are observed as
/// `Y_t = beta * exp(X_t / 2) * W_t` with `W_t ~ N(0, 1)`.
///
/// Proposals invert the observation equation: substituting the observed
/// `y_t` gives `X_t = ln(y_t^2 / beta^2) - ln(W_t^2)`, an exact draw from
/// the likelihood reshaped as a density in the state. The likelihood and
/// the proposal density then cancel up to the constant `1 / |y_t|`, so
/// the incremental weight is the transition density times that constant —
/// bounded by its peak, which is what exact rejection needs. (A plain
/// `N(y_t, ...)` proposal would leave an unbounded likelihood ratio.)
///
/// The first step's bound uses the stationary deviation
/// `sigma / sqrt(1 - phi^2)`: the peak of the stationary density, scaled
/// like every other step by `1 / |y_t|`.
#[derive(Clone, Debug)]
pub struct StochasticVolatility {
    phi: f64,
    sigma: f64,
    beta: f64,
    observations: Vec<f64>,
    /// `ln(y_t^2 / beta^2)` per step, the proposal's location constant.
    log_scaled: Vec<f64>,
    stationary_sd: f64,
    /// `ln|y_t|` per step, cached off the per-pair weight path.
    log_abs_obs: Vec<f64>,
    inv_sigma: f64,
    log_step_const: f64,
    log_step_peak: f64,
}

impl StochasticVolatility {
    /// Standard parameters: `phi = 0.95`, `sigma = 0.3`, `beta = 0.7`.
    pub fn new(observations: Vec<f64>) -> Result<Self, ModelError> {
        Self::with_parameters(0.95, 0.3, 0.7, observations)
    }

    pub fn with_parameters(
        phi: f64,
        sigma: f64,
        beta: f64,
        observations: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if !(phi.abs() < 1.0) {
            return Err(ModelError::InvalidParameter {
                name: "phi",
                requirement: "strictly inside (-1, 1) for a stationary start",
                value: phi,
            });
        }
        for (name, value) in [("sigma", sigma), ("beta", beta)] {
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
        for (index, &y) in observations.iter().enumerate() {
            if !y.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name: "observation",
                    requirement: "finite",
                    value: y,
                });
            }
            if y == 0.0 {
                return Err(ModelError::ZeroObservation { index });
            }
        }
        let log_scaled = observations.iter().map(|&y| (y * y / (beta * beta)).ln()).collect();
        let stationary_sd = sigma / (1.0 - phi * phi).sqrt();
        let log_abs_obs = observations.iter().map(|&y| y.abs().ln()).collect();
        Ok(Self {
            phi,
            sigma,
            beta,
            observations,
            log_scaled,
            stationary_sd,
            log_abs_obs,
            inv_sigma: 1.0 / sigma,
            log_step_const: log_normal_pdf(0.0, 0.0, sigma),
            log_step_peak: log_normal_peak(sigma),
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    /// Standard deviation of the stationary log-volatility law.
    pub fn stationary_sd(&self) -> f64 {
        self.stationary_sd
    }

    fn log_abs_observation(&self, t: usize) -> f64 {
        self.log_abs_obs[t - 1]
    }
}

impl FeynmanKac for StochasticVolatility {
    fn horizon(&self) -> usize {
        self.observations.len()
    }

    fn log_initial_weight(&self, x: f64) -> f64 {
        log_normal_pdf(x, 0.0, self.stationary_sd) - self.log_abs_observation(1)
    }

    fn transition_input(&self, _t: usize, prev: f64) -> f64 {
        self.phi * prev
    }

    #[inline]
    fn log_transition_weight_from_input(&self, t: usize, prev_input: f64, next: f64) -> f64 {
        let z = (next - prev_input) * self.inv_sigma;
        self.log_step_const - 0.5 * z * z - self.log_abs_obs[t - 1]
    }

    fn sample_proposal(&self, t: usize, rng: &mut RngStream) -> f64 {
        let w = rng.normal();
        self.log_scaled[t - 1] - (w * w).ln()
    }

    fn log_initial_bound(&self) -> f64 {
        log_normal_peak(self.stationary_sd) - self.log_abs_observation(1)
    }

    #[inline]
    fn log_transition_bound(&self, t: usize) -> f64 {
        self.log_step_peak - self.log_abs_obs[t - 1]
    }

    fn log_proposal_density(&self, t: usize, x: f64) -> Option<f64> {
        let v = self.log_scaled[t - 1] - x;
        Some(0.5 * v - 0.5 * v.exp() - 0.5 * (2.0 * std::f64::consts::PI).ln())
    }
}
