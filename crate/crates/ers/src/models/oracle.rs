//! Exact posterior step marginals on a fixed grid, for testing samplers.
//!
//! The oracle discretizes each step's state onto midpoints of a regular
//! grid and runs exact forward-backward recursions over the resulting
//! finite problem. Against a fine enough grid on a wide enough support,
//! the per-step marginals of any correct path sampler must match these
//! numbers to statistical accuracy — the oracle shares no code with the
//! samplers beyond the model's own weight functions.

use crate::model::FeynmanKac;
use crate::numeric::log_sum_exp;

/// Posterior step marginals and the normalizer, computed by quadrature.
#[derive(Clone, Debug)]
pub struct GridOracle {
    /// Cell midpoints shared by every step.
    pub points: Vec<f64>,
    /// Width of each cell.
    pub cell_width: f64,
    /// `marginals[t-1][k]`: posterior probability that step `t` lands in
    /// cell `k`. Each row sums to one.
    pub marginals: Vec<Vec<f64>>,
    /// Log of the model's normalizer, up to discretization error.
    pub log_z: f64,
}

impl GridOracle {
    /// Index of the cell containing `x`, or `None` outside the support.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let lo = self.points[0] - 0.5 * self.cell_width;
        if x < lo {
            return None;
        }
        let k = ((x - lo) / self.cell_width).floor() as usize;
        (k < self.points.len()).then_some(k)
    }
}

/// Computes [`GridOracle`] marginals for `model` on `resolution` cells
/// spanning `support`.
///
/// Requires the model to report proposal densities
/// ([`FeynmanKac::log_proposal_density`]); the posterior the samplers
/// target is the proposal law reweighted by the incremental weights, so
/// the density is part of the integrand. The support must be wide enough
/// that the posterior carries negligible mass outside it.
///
/// # Panics
///
/// Panics if the model reports no proposal density, if `resolution < 2`,
/// or if the support is not a finite interval.
pub fn grid_oracle<M: FeynmanKac + ?Sized>(
    model: &M,
    support: (f64, f64),
    resolution: usize,
) -> GridOracle {
    let (lo, hi) = support;
    assert!(lo.is_finite() && hi.is_finite() && lo < hi, "support must be a finite interval");
    assert!(resolution >= 2, "need at least two cells");
    let horizon = model.horizon();
    let cell_width = (hi - lo) / resolution as f64;
    let points: Vec<f64> =
        (0..resolution).map(|k| lo + (k as f64 + 0.5) * cell_width).collect();
    let log_width = cell_width.ln();

    // Per-step log cell masses of the proposal law.
    let log_cell_mass = |t: usize| -> Vec<f64> {
        points
            .iter()
            .map(|&x| {
                log_width
                    + model
                        .log_proposal_density(t, x)
                        .expect("the oracle requires a model with proposal densities")
            })
            .collect()
    };

    // Forward pass, normalized per step; the normalizers accumulate into
    // the log normalizer exactly as in the samplers' forward filter.
    let mut forwards: Vec<Vec<f64>> = Vec::with_capacity(horizon);
    let mut log_z = 0.0;
    {
        let mass = log_cell_mass(1);
        let mut alpha: Vec<f64> = points
            .iter()
            .zip(&mass)
            .map(|(&x, &lm)| lm + model.log_initial_weight(x))
            .collect();
        log_z += normalize_log(&mut alpha);
        forwards.push(alpha);
    }
    let mut inputs = vec![0.0; resolution];
    let mut row = vec![0.0; resolution];
    for t in 2..=horizon {
        let mass = log_cell_mass(t);
        let previous = &forwards[t - 2];
        for (input, &x) in inputs.iter_mut().zip(&points) {
            *input = model.transition_input(t, x);
        }
        let mut alpha = vec![0.0; resolution];
        for (k, &x) in points.iter().enumerate() {
            for ((term, &a), &input) in row.iter_mut().zip(previous).zip(&inputs) {
                *term = a + model.log_transition_weight_from_input(t, input, x);
            }
            alpha[k] = mass[k] + log_sum_exp(&row);
        }
        log_z += normalize_log(&mut alpha);
        forwards.push(alpha);
    }

    // Backward pass and marginals.
    let mut marginals = vec![Vec::new(); horizon];
    let mut beta = vec![0.0; resolution];
    for t in (1..=horizon).rev() {
        let mut marginal: Vec<f64> =
            forwards[t - 1].iter().zip(&beta).map(|(&a, &b)| a + b).collect();
        normalize_log(&mut marginal);
        marginals[t - 1] = marginal.iter().map(|&v| v.exp()).collect();
        if t > 1 {
            let mass = log_cell_mass(t);
            for (input, &x) in inputs.iter_mut().zip(&points) {
                *input = model.transition_input(t, x);
            }
            let mut next_beta = vec![0.0; resolution];
            for (j, &input) in inputs.iter().enumerate() {
                for (((term, &b), &lm), &x) in
                    row.iter_mut().zip(&beta).zip(&mass).zip(&points)
                {
                    *term = b + lm + model.log_transition_weight_from_input(t, input, x);
                }
                next_beta[j] = log_sum_exp(&row);
            }
            beta = next_beta;
            normalize_log(&mut beta);
        }
    }

    GridOracle { points, cell_width, marginals, log_z }
}

/// Shifts a log column so its exponentials sum to one; returns the shift.
fn normalize_log(column: &mut [f64]) -> f64 {
    let norm = log_sum_exp(column);
    assert!(norm > f64::NEG_INFINITY, "oracle columns must keep positive mass");
    for v in column.iter_mut() {
        *v -= norm;
    }
    norm
}
