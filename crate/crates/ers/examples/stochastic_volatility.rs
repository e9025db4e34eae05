//! Exact posterior draws of a log-volatility path given observed
//! returns, validated per step against a dense-grid quadrature oracle.
//!
//! The latent log-volatility `x` follows a stationary AR(1) chain and
//! each return is observed as `y = beta * exp(x / 2) * noise`. The
//! sampler proposes through an exact change of variables (each proposed
//! state already carries its observation), so the incremental weights
//! stay bounded and whole posterior paths can be accepted exactly.
//!
//! The chain parameters here are deliberately diffuse (`phi = 0.3`,
//! `sigma = 2.5`): the data, not the prior, pins the path, and the wide
//! transition keeps the weight bounds tight enough for fast acceptance.
//! A quadrature oracle on a 1024-point lattice supplies the exact
//! posterior step means to compare against.
//!
//! Run with `cargo run --release --example stochastic_volatility`.

use ers::models::oracle::grid_oracle;
use ers::models::simulate::simulate_stoch_vol;
use ers::models::StochasticVolatility;
use ers::{ers_trial, RngStream};

fn main() {
    let horizon = 40;
    let mut data_rng = RngStream::new(2718, 1 << 49);
    let (latent, returns) = simulate_stoch_vol(0.5, 0.5, 0.7, horizon, &mut data_rng);
    let model = StochasticVolatility::with_parameters(0.3, 2.5, 0.7, returns)
        .expect("simulation parameters are valid");
    println!(
        "stochastic volatility, T = {horizon}: sampling log-vol paths given observed returns"
    );

    // Exact per-step posterior from quadrature on a dense lattice.
    let oracle = grid_oracle(&model, (-16.0, 12.0), 1024);
    let oracle_mean: Vec<f64> = oracle
        .marginals
        .iter()
        .map(|step| step.iter().zip(&oracle.points).map(|(p, x)| p * x).sum())
        .collect();

    // Independent exact draws from the same posterior.
    let n = 100;
    let want = 250usize;
    let root = RngStream::new(16, 0);
    let mut sum = vec![0.0f64; horizon];
    let mut sum_sq = vec![0.0f64; horizon];
    let mut accepted = 0usize;
    let mut trials = 0u64;
    while accepted < want {
        trials += 1;
        if let (Some(path), _) = ers_trial(&model, n, &root.substream(trials)) {
            accepted += 1;
            for (t, x) in path.iter().enumerate() {
                sum[t] += x;
                sum_sq[t] += x * x;
            }
        }
    }
    println!();
    println!(
        "{accepted} accepted paths in {trials} trials \
         ({:.1}% acceptance at n = {n})",
        100.0 * accepted as f64 / trials as f64
    );

    println!();
    println!("{:>4}  {:>8}  {:>12}  {:>12}", "t", "truth", "oracle mean", "sample mean");
    let m = want as f64;
    let mut worst_z = 0.0f64;
    for t in 0..horizon {
        let mean = sum[t] / m;
        let sd = ((sum_sq[t] / m - mean * mean).max(0.0)).sqrt();
        let z = (mean - oracle_mean[t]).abs() / (sd / m.sqrt());
        worst_z = worst_z.max(z);
        if t < 6 || t >= horizon - 2 {
            println!("{:>4}  {:>8.3}  {:>12.3}  {:>12.3}", t + 1, latent[t], oracle_mean[t], mean);
        } else if t == 6 {
            println!("{:>4}", "...");
        }
    }
    println!();
    println!("worst standardized gap between sample and oracle means: {worst_z:.2} s.e.");
    assert!(worst_z < 5.0, "a posterior step mean drifted from the quadrature oracle");
}
