//! Tabulated weights on a finite state space.

use crate::model::{FeynmanKac, ModelError};
use crate::rng::RngStream;

/// A finite-state target with explicit weight tables.
///
/// States are `0.0, 1.0, ..., (m-1).0`; proposals are uniform over them.
/// The target path law is proportional to
/// `W1[i_1] * W[i_1][i_2] * ... * W[i_{T-1}][i_T]`. Everything about this
/// model is exactly computable — the normalizer by matrix products, the
/// path law and step marginals by enumeration — which makes it the
/// reference point for testing the samplers' exactness.
///
/// Bounds are table maxima: the full step bound is the largest table
/// entry, the bound for a fixed predecessor is its row maximum, and the
/// bound into a fixed successor is its column maximum.
#[derive(Clone, Debug)]
pub struct FiniteState {
    m: usize,
    horizon: usize,
    initial: Vec<f64>,
    /// Row-major `m x m`: entry `prev * m + next`.
    transitions: Vec<f64>,
    log_initial: Vec<f64>,
    log_transitions: Vec<f64>,
    log_initial_bound: f64,
    log_row_bounds: Vec<f64>,
    log_col_bounds: Vec<f64>,
    log_full_bound: f64,
}

impl FiniteState {
    /// Builds the model from an initial weight vector and a square
    /// transition weight table (`rows[prev][next]`).
    pub fn new(
        initial: Vec<f64>,
        transition_rows: Vec<Vec<f64>>,
        horizon: usize,
    ) -> Result<Self, ModelError> {
        if horizon == 0 {
            return Err(ModelError::EmptyHorizon);
        }
        let m = initial.len();
        if m == 0 {
            return Err(ModelError::InvalidTable("no states".into()));
        }
        if transition_rows.len() != m {
            return Err(ModelError::InvalidTable(format!(
                "{} transition rows for {m} states",
                transition_rows.len()
            )));
        }
        let mut transitions = Vec::with_capacity(m * m);
        for (i, row) in transition_rows.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::InvalidTable(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            transitions.extend_from_slice(row);
        }
        for &w in initial.iter().chain(&transitions) {
            if !(w.is_finite() && w >= 0.0) {
                return Err(ModelError::InvalidTable(format!(
                    "weights must be finite and nonnegative, got {w}"
                )));
            }
        }
        let initial_max = initial.iter().copied().fold(0.0f64, f64::max);
        let full_max = transitions.iter().copied().fold(0.0f64, f64::max);
        if initial_max == 0.0 || (horizon > 1 && full_max == 0.0) {
            return Err(ModelError::InvalidTable("every table needs a positive entry".into()));
        }

        let log_initial: Vec<f64> = initial.iter().map(|&w| w.ln()).collect();
        let log_transitions: Vec<f64> = transitions.iter().map(|&w| w.ln()).collect();
        let log_row_bounds = (0..m)
            .map(|i| transitions[i * m..(i + 1) * m].iter().copied().fold(0.0f64, f64::max).ln())
            .collect();
        let log_col_bounds = (0..m)
            .map(|j| (0..m).map(|i| transitions[i * m + j]).fold(0.0f64, f64::max).ln())
            .collect();
        Ok(Self {
            m,
            horizon,
            initial,
            transitions,
            log_initial,
            log_transitions,
            log_initial_bound: initial_max.ln(),
            log_row_bounds,
            log_col_bounds,
            log_full_bound: full_max.ln(),
        })
    }

    /// A model with every weight drawn uniformly from `[0.1, 1.0]`.
    ///
    /// Strictly positive entries keep the bound-to-floor ratio moderate,
    /// so randomized exactness sweeps cannot stall on degenerate grids.
    pub fn random_instance(m: usize, horizon: usize, rng: &mut RngStream) -> Self {
        assert!(m >= 1 && horizon >= 1);
        let mut draw = || 0.1 + 0.9 * rng.uniform();
        let initial = (0..m).map(|_| draw()).collect();
        let rows = (0..m).map(|_| (0..m).map(|_| draw()).collect()).collect();
        Self::new(initial, rows, horizon).expect("positive tables are always valid")
    }

    /// Number of states.
    pub fn num_states(&self) -> usize {
        self.m
    }

    /// Initial weight of state `i`.
    pub fn initial_weight(&self, i: usize) -> f64 {
        self.initial[i]
    }

    /// Transition weight from state `i` to state `j`.
    pub fn transition_weight(&self, i: usize, j: usize) -> f64 {
        self.transitions[i * self.m + j]
    }

    /// Maps a lattice value produced by this model back to its state id.
    pub fn state_index(&self, x: f64) -> usize {
        debug_assert!(
            x.fract() == 0.0 && (0.0..self.m as f64).contains(&x),
            "state {x} is not one of the {} lattice points",
            self.m
        );
        x as usize
    }

    /// Exact log normalizer by per-step normalized matrix products.
    pub fn exact_log_z(&self) -> f64 {
        let m = self.m as f64;
        let mut values: Vec<f64> = self.initial.clone();
        let mut log_norm = 0.0;
        let total: f64 = values.iter().sum();
        log_norm += total.ln();
        values.iter_mut().for_each(|v| *v /= total);
        for _ in 2..=self.horizon {
            let next: Vec<f64> = (0..self.m)
                .map(|j| {
                    (0..self.m).map(|i| values[i] * self.transition_weight(i, j)).sum::<f64>()
                })
                .collect();
            let total: f64 = next.iter().sum();
            log_norm += total.ln();
            values = next.iter().map(|v| v / total).collect();
        }
        log_norm - self.horizon as f64 * m.ln()
    }

    /// Exact posterior probability of each state at each step
    /// (`result[t-1][i]`), by forward-backward products over the tables.
    pub fn posterior_marginals(&self) -> Vec<Vec<f64>> {
        let m = self.m;
        // Forward: alpha[t][i] proportional to the weight of all length-t
        // prefixes ending in i; normalized per step for stability.
        let mut alphas: Vec<Vec<f64>> = Vec::with_capacity(self.horizon);
        let mut alpha: Vec<f64> = self.initial.clone();
        normalize(&mut alpha);
        alphas.push(alpha.clone());
        for _ in 2..=self.horizon {
            let next: Vec<f64> = (0..m)
                .map(|j| (0..m).map(|i| alpha[i] * self.transition_weight(i, j)).sum())
                .collect();
            alpha = next;
            normalize(&mut alpha);
            alphas.push(alpha.clone());
        }
        // Backward: beta[t][i] proportional to the weight of all suffixes
        // starting from i.
        let mut beta = vec![1.0; m];
        let mut marginals = vec![Vec::new(); self.horizon];
        for t in (1..=self.horizon).rev() {
            let mut marginal: Vec<f64> =
                (0..m).map(|i| alphas[t - 1][i] * beta[i]).collect();
            normalize(&mut marginal);
            marginals[t - 1] = marginal;
            if t > 1 {
                let prev_beta: Vec<f64> = (0..m)
                    .map(|i| (0..m).map(|j| self.transition_weight(i, j) * beta[j]).sum())
                    .collect();
                beta = prev_beta;
                normalize(&mut beta);
            }
        }
        marginals
    }
}

fn normalize(values: &mut [f64]) {
    let total: f64 = values.iter().sum();
    assert!(total > 0.0, "finite-state recursion lost all mass");
    values.iter_mut().for_each(|v| *v /= total);
}

impl FeynmanKac for FiniteState {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn log_initial_weight(&self, x: f64) -> f64 {
        self.log_initial[self.state_index(x)]
    }

    fn log_transition_weight_from_input(&self, _t: usize, prev_input: f64, next: f64) -> f64 {
        self.log_transitions[self.state_index(prev_input) * self.m + self.state_index(next)]
    }

    fn sample_proposal(&self, _t: usize, rng: &mut RngStream) -> f64 {
        (rng.uniform() * self.m as f64).floor().min((self.m - 1) as f64)
    }

    fn log_initial_bound(&self) -> f64 {
        self.log_initial_bound
    }

    fn log_transition_bound(&self, _t: usize) -> f64 {
        self.log_full_bound
    }

    fn log_transition_bound_from(&self, _t: usize, prev: f64) -> f64 {
        self.log_row_bounds[self.state_index(prev)]
    }

    fn log_transition_bound_into(&self, _t: usize, next: f64) -> f64 {
        self.log_col_bounds[self.state_index(next)]
    }

    fn log_weight_floor(&self) -> Option<f64> {
        let min_initial = self.initial.iter().copied().fold(f64::INFINITY, f64::min);
        let min_transition = if self.horizon > 1 {
            self.transitions.iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            f64::INFINITY
        };
        let floor = min_initial.min(min_transition);
        (floor > 0.0).then(|| floor.ln())
    }

    fn log_proposal_density(&self, _t: usize, _x: f64) -> Option<f64> {
        // Probability mass 1/m per state; on the unit-spaced lattice this
        // doubles as the cell density for quadrature oracles.
        Some(-(self.m as f64).ln())
    }
}
