//! Exactness on a finite-state model, where every claim the sampler
//! makes can be checked against full enumeration.
//!
//! With `m` states and horizon `T` there are only `m^T` paths, so the
//! posterior, the normalizing constant, and every step marginal are
//! computable in closed form. This example draws accepted paths from a
//! random weight table and verifies two properties that hold by
//! construction:
//!
//! * accepted paths follow the exact joint posterior over all `m^T`
//!   paths (chi-square over every path, not just marginals), and
//! * the grid estimate `z_hat` is unbiased for the true normalizing
//!   constant, even though each individual trial only sees `n` of the
//!   `m` states per step.
//!
//! Run with `cargo run --release --example finite_state_exactness`.

use ers::models::FiniteState;
use ers::stats::chi_square_test;
use ers::{ers_trial, RngStream};

fn main() {
    let (m, horizon) = (3usize, 3usize);
    let model = FiniteState::random_instance(m, horizon, &mut RngStream::new(58, 0));
    let num_paths = m.pow(horizon as u32);
    println!("random weight table on {m} states, T = {horizon}: {num_paths} possible paths");

    // Enumerate the exact joint posterior.
    let mut weights = vec![0.0f64; num_paths];
    for (code, w) in weights.iter_mut().enumerate() {
        let digits: Vec<usize> = (0..horizon)
            .rev()
            .map(|place| code / m.pow(place as u32) % m)
            .collect();
        let mut weight = model.initial_weight(digits[0]);
        for pair in digits.windows(2) {
            weight *= model.transition_weight(pair[0], pair[1]);
        }
        *w = weight;
    }
    let total: f64 = weights.iter().sum();
    let exact_probs: Vec<f64> = weights.iter().map(|w| w / total).collect();

    // Sample until 20_000 paths are accepted, tallying each full path.
    let n = 6;
    let want = 20_000u64;
    let root = RngStream::new(4242, 0);
    let mut counts = vec![0u64; num_paths];
    let mut z_hats = Vec::new();
    let mut accepted = 0u64;
    let mut trials = 0u64;
    while accepted < want {
        trials += 1;
        let (path, record) = ers_trial(&model, n, &root.substream(trials));
        z_hats.push(record.log_z_hat.exp());
        if let Some(path) = path {
            accepted += 1;
            let code = path.iter().fold(0usize, |acc, &x| acc * m + model.state_index(x));
            counts[code] += 1;
        }
    }
    println!(
        "{want} accepted paths in {trials} trials ({:.1}% acceptance at n = {n})",
        100.0 * want as f64 / trials as f64
    );

    // Joint law over all paths against enumeration.
    let report = chi_square_test(&counts, &exact_probs, 1e-3);
    println!();
    println!(
        "joint posterior over all {num_paths} paths: chi-square {:.1} vs threshold {:.1} \
         ({} degrees of freedom)",
        report.statistic, report.threshold, report.dof
    );
    assert!(report.passed, "sampled paths diverged from the enumerated posterior");

    // Unbiased normalizing constant: every trial contributes a z_hat.
    let exact_z = model.exact_log_z().exp();
    let mean: f64 = z_hats.iter().sum::<f64>() / z_hats.len() as f64;
    let var: f64 = z_hats.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>()
        / (z_hats.len() as f64 - 1.0);
    let se = (var / z_hats.len() as f64).sqrt();
    println!();
    println!(
        "normalizing constant: exact {exact_z:.6}, mean z_hat over {} grids {mean:.6} \
         ({:+.2} s.e.)",
        z_hats.len(),
        (mean - exact_z) / se
    );
    assert!((mean - exact_z).abs() < 4.0 * se, "z_hat drifted from the exact constant");
}
