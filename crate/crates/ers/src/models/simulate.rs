//! Synthetic observation records for the observed models.

use crate::rng::RngStream;

/// Simulates the tanh-drift autoregression and its noisy observations.
///
/// Returns `(latent, observations)`, each of length `horizon`.
pub fn simulate_nonlinear_ar(
    phi: f64,
    sigma_v: f64,
    sigma_w: f64,
    horizon: usize,
    rng: &mut RngStream,
) -> (Vec<f64>, Vec<f64>) {
    assert!(sigma_v > 0.0 && sigma_w > 0.0 && phi.is_finite() && horizon > 0);
    let mut latent = Vec::with_capacity(horizon);
    let mut observations = Vec::with_capacity(horizon);
    let mut x = rng.normal();
    for _ in 0..horizon {
        latent.push(x);
        observations.push(x + sigma_w * rng.normal());
        x = phi * x.tanh() + sigma_v * rng.normal();
    }
    (latent, observations)
}

/// Simulates the stochastic volatility chain and its observed returns.
///
/// The log-volatility starts in its stationary law; returns are
/// `beta * exp(x/2)` times standard normal noise. Returns
/// `(latent, observations)`, each of length `horizon`.
pub fn simulate_stoch_vol(
    phi: f64,
    sigma: f64,
    beta: f64,
    horizon: usize,
    rng: &mut RngStream,
) -> (Vec<f64>, Vec<f64>) {
    assert!(phi.abs() < 1.0 && sigma > 0.0 && beta > 0.0 && horizon > 0);
    let stationary_sd = sigma / (1.0 - phi * phi).sqrt();
    let mut latent = Vec::with_capacity(horizon);
    let mut observations = Vec::with_capacity(horizon);
    let mut x = stationary_sd * rng.normal();
    for _ in 0..horizon {
        latent.push(x);
        observations.push(beta * (x / 2.0).exp() * rng.normal());
        x = phi * x + sigma * rng.normal();
    }
    (latent, observations)
}
