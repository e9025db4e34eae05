//! Shared helpers for the integration suites: brute-force normalizer
//! oracles that enumerate every index path through a grid, and binning
//! utilities for comparing sampled distributions against references.

#![allow(dead_code)]

use ers::numeric::log_sum_exp;
use ers::{EnsembleGrid, FeynmanKac};

/// Relative closeness with an absolute fallback near zero.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}

/// Calls `visit` with every length-`horizon` tuple of indices below `n`.
pub fn enumerate_index_paths(n: usize, horizon: usize, visit: &mut impl FnMut(&[usize])) {
    let mut path = vec![0usize; horizon];
    loop {
        visit(&path);
        let mut t = 0;
        loop {
            path[t] += 1;
            if path[t] < n {
                break;
            }
            path[t] = 0;
            t += 1;
            if t == horizon {
                return;
            }
        }
    }
}

/// Log weight of the grid path selected by `indices`.
pub fn path_log_weight<M: FeynmanKac + ?Sized>(
    model: &M,
    grid: &EnsembleGrid,
    indices: &[usize],
) -> f64 {
    let mut total = model.log_initial_weight(grid.value(1, indices[0]));
    for t in 2..=grid.horizon() {
        let prev = grid.value(t - 1, indices[t - 2]);
        let next = grid.value(t, indices[t - 1]);
        total += model.log_transition_weight(t, prev, next);
    }
    total
}

/// The grid normalizer estimate, spelled as its defining `N^T`-term
/// average over every index path. Exponential in the horizon — test
/// instances must keep `n^horizon` small.
pub fn brute_log_z_hat<M: FeynmanKac + ?Sized>(model: &M, grid: &EnsembleGrid) -> f64 {
    let mut terms = Vec::new();
    enumerate_index_paths(grid.n(), grid.horizon(), &mut |path| {
        terms.push(path_log_weight(model, grid, path));
    });
    log_sum_exp(&terms) - grid.horizon() as f64 * (grid.n() as f64).ln()
}

/// The dominating normalizer: the same `N^T`-term average with every
/// weight factor that touches the selected coordinates replaced by the
/// matching bound (the full step bound when both endpoints are selected,
/// the one-sided bound when one is).
pub fn brute_log_z_bar<M: FeynmanKac + ?Sized>(
    model: &M,
    grid: &EnsembleGrid,
    selected: &[usize],
) -> f64 {
    let mut terms = Vec::new();
    enumerate_index_paths(grid.n(), grid.horizon(), &mut |path| {
        let mut total = if path[0] == selected[0] {
            model.log_initial_bound()
        } else {
            model.log_initial_weight(grid.value(1, path[0]))
        };
        for t in 2..=grid.horizon() {
            let prev_hit = path[t - 2] == selected[t - 2];
            let next_hit = path[t - 1] == selected[t - 1];
            let prev = grid.value(t - 1, path[t - 2]);
            let next = grid.value(t, path[t - 1]);
            total += match (prev_hit, next_hit) {
                (true, true) => model.log_transition_bound(t),
                (true, false) => model.log_transition_bound_into(t, next),
                (false, true) => model.log_transition_bound_from(t, prev),
                (false, false) => model.log_transition_weight(t, prev, next),
            };
        }
        terms.push(total);
    });
    log_sum_exp(&terms) - grid.horizon() as f64 * (grid.n() as f64).ln()
}

/// Groups cells into `bins` contiguous bins of near-equal probability.
///
/// Returns the bin index of every cell. Each bin's mass is close to
/// `1 / bins`, which keeps chi-square expected counts healthy even when
/// the cell distribution is very uneven.
pub fn equal_mass_bins(probs: &[f64], bins: usize) -> Vec<usize> {
    assert!(bins >= 2 && probs.len() >= bins);
    let mut assignment = vec![0usize; probs.len()];
    let mut cumulative = 0.0;
    let mut bin = 0usize;
    for (cell, &p) in probs.iter().enumerate() {
        assignment[cell] = bin.min(bins - 1);
        cumulative += p;
        // Advance once the running mass crosses the next boundary.
        while bin + 1 < bins && cumulative >= (bin + 1) as f64 / bins as f64 {
            bin += 1;
        }
    }
    assignment
}

/// Sums cell probabilities within each bin.
pub fn bin_probs(probs: &[f64], assignment: &[usize], bins: usize) -> Vec<f64> {
    let mut out = vec![0.0; bins];
    for (&p, &b) in probs.iter().zip(assignment) {
        out[b] += p;
    }
    out
}
