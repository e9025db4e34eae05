//! Ensemble grids and the dynamic-programming passes over them.
//!
//! A grid holds `n` candidate values per time step, drawn independently
//! from the model's proposals. Three passes over a grid drive the path
//! sampler in [`crate::dynamic`]:
//!
//! * [`forward_filter`] sums the incremental-weight products of all `n^T`
//!   grid paths in `O(n^2 T)` time. Divided by `n^T`, that sum is an
//!   unbiased estimate of the model's normalizing constant.
//! * [`backward_sample`] draws one grid path with probability proportional
//!   to its weight product, reusing the filter tables.
//! * [`bounding_recursion`] repeats the forward sum with every factor that
//!   touches the selected path's coordinates replaced by its worst case
//!   over the substituted argument. The result dominates the forward
//!   estimate no matter what values the selected coordinates take, which
//!   is exactly what the accept/reject step in [`crate::dynamic`] needs.
//!
//! All columns are time-major: step `t` occupies `values[(t-1)*n..t*n]`.
//! Step indices are 1-based throughout, matching [`crate::model::FeynmanKac`].

use crate::model::{checked_initial_weight, checked_transition_from_input, FeynmanKac};
use crate::numeric::{log_sum_exp, sample_categorical_from_log};
use crate::rng::{RngStream, LABEL_SELECT};

/// Candidate values for every time step, `n` per step.
///
/// Column `t` is drawn from a dedicated substream labelled `t`, so the
/// first value of each column is the value a single-candidate grid (or a
/// plain rejection-sampling trial on the same stream) would draw. Growing
/// `n` extends each column without disturbing its prefix.
#[derive(Clone, Debug)]
pub struct EnsembleGrid {
    values: Vec<f64>,
    n: usize,
    horizon: usize,
}

impl EnsembleGrid {
    /// Draws a fresh `n`-candidate grid for `model` from `rng`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0` or the model's horizon is zero.
    pub fn sample<M: FeynmanKac + ?Sized>(model: &M, n: usize, rng: &RngStream) -> Self {
        let horizon = model.horizon();
        assert!(n > 0, "ensemble size must be positive");
        assert!(horizon > 0, "model horizon must be positive");
        let mut values = Vec::with_capacity(n * horizon);
        for t in 1..=horizon {
            let mut column_rng = rng.substream(t as u64);
            for _ in 0..n {
                values.push(model.sample_proposal(t, &mut column_rng));
            }
        }
        Self { values, n, horizon }
    }

    /// Wraps explicit values (time-major, `n` per step) as a grid.
    ///
    /// # Panics
    ///
    /// Panics unless `values.len() == n * horizon` with both positive.
    pub fn from_parts(values: Vec<f64>, n: usize, horizon: usize) -> Self {
        assert!(n > 0 && horizon > 0, "grid dimensions must be positive");
        assert_eq!(
            values.len(),
            n * horizon,
            "grid expects {n} values for each of {horizon} steps"
        );
        Self { values, n, horizon }
    }

    /// Number of candidates per step.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of time steps.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The candidates for step `t` (1-based).
    pub fn column(&self, t: usize) -> &[f64] {
        assert!((1..=self.horizon).contains(&t), "step {t} out of range");
        &self.values[(t - 1) * self.n..t * self.n]
    }

    /// Candidate `i` of step `t` (1-based `t`, 0-based `i`).
    pub fn value(&self, t: usize, i: usize) -> f64 {
        self.column(t)[i]
    }
}

/// Output of [`forward_filter`]: per-step normalized filters plus the
/// accumulated log normalizer.
#[derive(Clone, Debug)]
pub struct ForwardFilter {
    log_filters: Vec<f64>,
    log_z_hat: f64,
    degenerate_step: Option<usize>,
    n: usize,
    horizon: usize,
}

impl ForwardFilter {
    /// Log of the grid-average normalizer estimate; `-inf` when degenerate.
    pub fn log_z_hat(&self) -> f64 {
        self.log_z_hat
    }

    /// First step whose candidates all carry zero weight, if any.
    ///
    /// A degenerate step leaves no path to select: the trial counts as an
    /// outright rejection and the filter tables past that step are unusable.
    pub fn degenerate_step(&self) -> Option<usize> {
        self.degenerate_step
    }

    /// Normalized log filter values for step `t`.
    pub fn log_filter_column(&self, t: usize) -> &[f64] {
        assert!((1..=self.horizon).contains(&t), "step {t} out of range");
        &self.log_filters[(t - 1) * self.n..t * self.n]
    }

    /// Filter values for step `t` on the linear scale (they sum to one).
    pub fn filter_column(&self, t: usize) -> Vec<f64> {
        self.log_filter_column(t).iter().map(|&v| v.exp()).collect()
    }
}

/// Sums the weight products of all grid paths by dynamic programming.
///
/// Step 1 weighs each candidate on its own; every later step folds the
/// previous step's normalized filter through the pairwise weight, an
/// `n^2` inner product per step. Per-step normalization keeps the filter
/// in range at any horizon; the normalizers accumulate into
/// [`ForwardFilter::log_z_hat`].
///
/// # Panics
///
/// Panics if the grid and model horizons disagree.
pub fn forward_filter<M: FeynmanKac + ?Sized>(model: &M, grid: &EnsembleGrid) -> ForwardFilter {
    let n = grid.n();
    let horizon = grid.horizon();
    assert_eq!(horizon, model.horizon(), "grid and model horizons differ");
    let mut log_filters = vec![f64::NEG_INFINITY; n * horizon];
    let mut log_norm = 0.0;
    let mut degenerate_step = None;

    {
        let column = grid.column(1);
        let out = &mut log_filters[..n];
        for (slot, &x) in out.iter_mut().zip(column) {
            *slot = checked_initial_weight(model, x);
        }
        match normalize_column(out) {
            Some(step_norm) => log_norm += step_norm,
            None => degenerate_step = Some(1),
        }
    }

    let mut inputs = vec![0.0; n];
    let mut row = vec![0.0; n];
    for t in 2..=horizon {
        if degenerate_step.is_some() {
            break;
        }
        let prev_column = grid.column(t - 1);
        for (input, &prev) in inputs.iter_mut().zip(prev_column) {
            *input = model.transition_input(t, prev);
        }
        let (done, rest) = log_filters.split_at_mut((t - 1) * n);
        let prev_filter = &done[(t - 2) * n..];
        let out = &mut rest[..n];
        let column = grid.column(t);
        for (slot, &x) in out.iter_mut().zip(column) {
            for ((term, &lp), &input) in row.iter_mut().zip(prev_filter).zip(&inputs) {
                *term = lp + checked_transition_from_input(model, t, input, x);
            }
            *slot = log_sum_exp(&row);
        }
        match normalize_column(out) {
            Some(step_norm) => log_norm += step_norm,
            None => degenerate_step = Some(t),
        }
    }

    let log_z_hat = if degenerate_step.is_some() {
        f64::NEG_INFINITY
    } else {
        log_norm - horizon as f64 * (n as f64).ln()
    };
    ForwardFilter {
        log_filters,
        log_z_hat,
        degenerate_step,
        n,
        horizon,
    }
}

/// Rescales a log column to sum to one, returning its log normalizer.
///
/// Returns `None` (leaving the column untouched) when every entry is
/// `-inf`, i.e. the step is degenerate.
fn normalize_column(column: &mut [f64]) -> Option<f64> {
    let step_norm = log_sum_exp(column);
    if step_norm == f64::NEG_INFINITY {
        return None;
    }
    for value in column {
        *value -= step_norm;
    }
    Some(step_norm)
}

/// One grid path selected with probability proportional to its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ProposalDraw {
    /// Selected values, one per step.
    pub path: Vec<f64>,
    /// Selected column indices, one per step.
    pub indices: Vec<usize>,
}

/// Draws a grid path with probability proportional to its weight product.
///
/// Selection runs backwards: the final index follows the last filter
/// column, and each earlier index reweights its filter column by the
/// pairwise weight into the value already chosen for the next step. The
/// selection uniforms come from the dedicated substream
/// `rng.substream(1 << 48)`, one per step from the last backwards, so the
/// draw is a pure function of `(grid, rng)`.
///
/// # Panics
///
/// Panics when the filter is degenerate (no path has positive weight) or
/// when grid and filter shapes disagree.
pub fn backward_sample<M: FeynmanKac + ?Sized>(
    model: &M,
    grid: &EnsembleGrid,
    filter: &ForwardFilter,
    rng: &RngStream,
) -> ProposalDraw {
    let n = grid.n();
    let horizon = grid.horizon();
    assert_eq!((filter.n, filter.horizon), (n, horizon), "filter does not match grid");
    assert!(
        filter.degenerate_step.is_none(),
        "cannot select a path through a degenerate filter"
    );
    let mut select_rng = rng.substream(LABEL_SELECT);
    let mut indices = vec![0usize; horizon];
    let mut scratch = Vec::with_capacity(n);
    let mut row = vec![0.0; n];

    let last = sample_categorical_from_log(
        filter.log_filter_column(horizon),
        select_rng.uniform(),
        &mut scratch,
    )
    .expect("non-degenerate filter column has positive mass");
    indices[horizon - 1] = last;

    for t in (1..horizon).rev() {
        let next_value = grid.value(t + 1, indices[t]);
        let prev_filter = filter.log_filter_column(t);
        let column = grid.column(t);
        for ((term, &lp), &prev) in row.iter_mut().zip(prev_filter).zip(column) {
            *term = lp + model.log_transition_weight(t + 1, prev, next_value);
        }
        indices[t - 1] = sample_categorical_from_log(&row, select_rng.uniform(), &mut scratch)
            .expect("selected value is reachable from some candidate");
    }

    let path = indices
        .iter()
        .enumerate()
        .map(|(step, &i)| grid.value(step + 1, i))
        .collect();
    ProposalDraw { path, indices }
}

/// Worst-case counterpart of [`forward_filter`] for a selected path.
///
/// Reruns the forward sum with every factor that reads a selected
/// coordinate replaced by a bound over that argument: factors reading the
/// selected value of the previous step use the into-bound, factors feeding
/// the selected value of the current step use the from-bound, and the
/// factor connecting two selected values uses the full step bound. The
/// returned log sum therefore dominates [`ForwardFilter::log_z_hat`]
/// uniformly over the selected coordinates' values (up to roundoff from
/// reassociated sums).
///
/// # Panics
///
/// Panics when `indices` does not name one candidate per step.
pub fn bounding_recursion<M: FeynmanKac + ?Sized>(
    model: &M,
    grid: &EnsembleGrid,
    indices: &[usize],
) -> f64 {
    let n = grid.n();
    let horizon = grid.horizon();
    assert_eq!(horizon, model.horizon(), "grid and model horizons differ");
    assert_eq!(indices.len(), horizon, "one selected index per step required");
    assert!(indices.iter().all(|&i| i < n), "selected index out of range");

    let mut bounds = vec![0.0; n];
    let mut next_bounds = vec![0.0; n];
    let mut inputs = vec![0.0; n];
    let mut row = vec![0.0; n];
    let mut log_norm = 0.0;

    {
        let column = grid.column(1);
        let selected = indices[0];
        for (i, (slot, &x)) in bounds.iter_mut().zip(column).enumerate() {
            *slot = if i == selected {
                model.log_initial_bound()
            } else {
                checked_initial_weight(model, x)
            };
        }
        log_norm += normalize_column(&mut bounds).expect("initial bound is positive");
    }

    for t in 2..=horizon {
        let prev_column = grid.column(t - 1);
        let column = grid.column(t);
        let prev_selected = indices[t - 2];
        let selected = indices[t - 1];
        for (input, &prev) in inputs.iter_mut().zip(prev_column) {
            *input = model.transition_input(t, prev);
        }
        for (i, (slot, &x)) in next_bounds.iter_mut().zip(column).enumerate() {
            if i == selected {
                continue;
            }
            for (j, ((term, &lb), &input)) in row.iter_mut().zip(&bounds).zip(&inputs).enumerate() {
                *term = lb
                    + if j == prev_selected {
                        model.log_transition_bound_into(t, x)
                    } else {
                        checked_transition_from_input(model, t, input, x)
                    };
            }
            *slot = log_sum_exp(&row);
        }
        for (j, ((term, &lb), &prev)) in row.iter_mut().zip(&bounds).zip(prev_column).enumerate() {
            *term = lb
                + if j == prev_selected {
                    model.log_transition_bound(t)
                } else {
                    model.log_transition_bound_from(t, prev)
                };
        }
        next_bounds[selected] = log_sum_exp(&row);
        debug_assert!(
            next_bounds[selected] > f64::NEG_INFINITY,
            "the selected row always keeps the running bound positive"
        );
        log_norm += normalize_column(&mut next_bounds).expect("bound column has positive mass");
        std::mem::swap(&mut bounds, &mut next_bounds);
    }

    log_norm - horizon as f64 * (n as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FeynmanKac;
    use crate::stats::chi_square_test;

    /// Pairwise weight `exp(-a*prev^2 - b*next^2 - g*(next-prev)^2)` with
    /// initial weight `exp(-x^2)`. Dropping nonpositive terms gives genuine
    /// dominating bounds: `exp(-a*prev^2)` over next, `exp(-b*next^2)` over
    /// prev, and `1` overall.
    struct QuadKernel {
        horizon: usize,
        a: f64,
        b: f64,
        g: f64,
    }

    impl FeynmanKac for QuadKernel {
        fn horizon(&self) -> usize {
            self.horizon
        }
        fn log_initial_weight(&self, x: f64) -> f64 {
            -x * x
        }
        fn log_transition_weight_from_input(&self, _t: usize, prev_input: f64, next: f64) -> f64 {
            -self.a * prev_input * prev_input
                - self.b * next * next
                - self.g * (next - prev_input) * (next - prev_input)
        }
        fn sample_proposal(&self, _t: usize, rng: &mut RngStream) -> f64 {
            rng.normal()
        }
        fn log_initial_bound(&self) -> f64 {
            0.0
        }
        fn log_transition_bound(&self, _t: usize) -> f64 {
            0.0
        }
        fn log_transition_bound_from(&self, _t: usize, prev: f64) -> f64 {
            -self.a * prev * prev
        }
        fn log_transition_bound_into(&self, _t: usize, next: f64) -> f64 {
            -self.b * next * next
        }
    }

    fn kernel(horizon: usize) -> QuadKernel {
        QuadKernel {
            horizon,
            a: 0.3,
            b: 0.2,
            g: 0.5,
        }
    }

    /// Weight product of one explicit grid path (true weights only).
    fn path_log_weight<M: FeynmanKac + ?Sized>(model: &M, grid: &EnsembleGrid, path: &[usize]) -> f64 {
        let mut total = model.log_initial_weight(grid.value(1, path[0]));
        for t in 2..=grid.horizon() {
            total +=
                model.log_transition_weight(t, grid.value(t - 1, path[t - 2]), grid.value(t, path[t - 1]));
        }
        total
    }

    /// Enumerates all `n^T` paths and averages their weight products.
    fn brute_log_z_hat<M: FeynmanKac + ?Sized>(model: &M, grid: &EnsembleGrid) -> f64 {
        let mut terms = Vec::new();
        let mut path = vec![0usize; grid.horizon()];
        enumerate_paths(grid, &mut path, 0, &mut |path| {
            terms.push(path_log_weight(model, grid, path));
        });
        log_sum_exp(&terms) - grid.horizon() as f64 * (grid.n() as f64).ln()
    }

    /// Same enumeration with factors touching `selected` coordinates
    /// replaced by the matching bound, mirroring the recursion's contract.
    fn brute_log_z_bar<M: FeynmanKac + ?Sized>(
        model: &M,
        grid: &EnsembleGrid,
        selected: &[usize],
    ) -> f64 {
        let mut terms = Vec::new();
        let mut path = vec![0usize; grid.horizon()];
        enumerate_paths(grid, &mut path, 0, &mut |path| {
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

    fn enumerate_paths(
        grid: &EnsembleGrid,
        path: &mut Vec<usize>,
        depth: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if depth == grid.horizon() {
            visit(path);
            return;
        }
        for i in 0..grid.n() {
            path[depth] = i;
            enumerate_paths(grid, path, depth + 1, visit);
        }
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn two_by_two_filter_matches_hand_enumeration() {
        let model = kernel(2);
        let grid = EnsembleGrid::from_parts(vec![0.1, -0.4, 0.7, 0.2], 2, 2);
        let filter = forward_filter(&model, &grid);

        let w1 = |x: f64| (-x * x).exp();
        let w2 = |p: f64, x: f64| {
            (-0.3 * p * p - 0.2 * x * x - 0.5 * (x - p) * (x - p)).exp()
        };
        let mut total = 0.0;
        for &i in &[0.1f64, -0.4] {
            for &j in &[0.7f64, 0.2] {
                total += w1(i) * w2(i, j);
            }
        }
        let expected = (total / 4.0).ln();
        assert!(
            rel_close(filter.log_z_hat(), expected, 1e-12),
            "filter {} vs hand enumeration {}",
            filter.log_z_hat(),
            expected
        );
    }

    #[test]
    fn filter_columns_are_normalized() {
        let model = kernel(4);
        let grid = EnsembleGrid::sample(&model, 7, &RngStream::new(11, 0));
        let filter = forward_filter(&model, &grid);
        for t in 1..=4 {
            let sum: f64 = filter.filter_column(t).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "column {t} sums to {sum}");
        }
    }

    #[test]
    fn filter_matches_dense_enumeration() {
        let model = kernel(3);
        for seed in 0..20 {
            let grid = EnsembleGrid::sample(&model, 3, &RngStream::new(seed, 0));
            let filter = forward_filter(&model, &grid);
            let brute = brute_log_z_hat(&model, &grid);
            assert!(
                rel_close(filter.log_z_hat(), brute, 1e-10),
                "seed {seed}: filter {} vs brute {}",
                filter.log_z_hat(),
                brute
            );
        }
    }

    #[test]
    fn bounding_recursion_matches_substituted_enumeration() {
        let model = kernel(3);
        let mut checked = 0;
        for seed in 0..20u64 {
            let grid = EnsembleGrid::sample(&model, 3, &RngStream::new(seed, 0));
            let filter = forward_filter(&model, &grid);
            let draw = backward_sample(&model, &grid, &filter, &RngStream::new(seed, 1));
            let log_z_bar = bounding_recursion(&model, &grid, &draw.indices);
            let brute = brute_log_z_bar(&model, &grid, &draw.indices);
            assert!(
                rel_close(log_z_bar, brute, 1e-10),
                "seed {seed}: recursion {log_z_bar} vs brute {brute}"
            );
            assert!(
                filter.log_z_hat() <= log_z_bar + 1e-12,
                "seed {seed}: estimate {} exceeds bound {log_z_bar}",
                filter.log_z_hat()
            );
            checked += 1;
        }
        assert_eq!(checked, 20);
    }

    #[test]
    fn bound_dominates_for_every_selected_path() {
        let model = kernel(2);
        let grid = EnsembleGrid::from_parts(vec![0.3, -0.8, 1.1, -0.2, 0.5, 0.9], 3, 2);
        let filter = forward_filter(&model, &grid);
        for k1 in 0..3 {
            for k2 in 0..3 {
                let log_z_bar = bounding_recursion(&model, &grid, &[k1, k2]);
                let brute = brute_log_z_bar(&model, &grid, &[k1, k2]);
                assert!(rel_close(log_z_bar, brute, 1e-10));
                assert!(filter.log_z_hat() <= log_z_bar + 1e-12);
            }
        }
    }

    #[test]
    fn backward_draws_follow_path_weights() {
        let model = kernel(3);
        let grid = EnsembleGrid::sample(&model, 3, &RngStream::new(5, 0));
        let filter = forward_filter(&model, &grid);

        let mut log_probs = Vec::with_capacity(27);
        let mut path = vec![0usize; 3];
        enumerate_paths(&grid, &mut path, 0, &mut |path| {
            log_probs.push(path_log_weight(&model, &grid, path));
        });
        let total = log_sum_exp(&log_probs);
        let expected: Vec<f64> = log_probs.iter().map(|&lp| (lp - total).exp()).collect();

        let draws = 100_000;
        let root = RngStream::new(40, 0);
        let mut observed = vec![0u64; 27];
        for trial in 0..draws {
            let draw = backward_sample(&model, &grid, &filter, &root.substream(trial));
            let cell = (draw.indices[0] * 3 + draw.indices[1]) * 3 + draw.indices[2];
            observed[cell] += 1;
        }
        let report = chi_square_test(&observed, &expected, 1e-3);
        assert!(
            report.passed,
            "chi-square {} over threshold {}",
            report.statistic, report.threshold
        );
    }

    #[test]
    fn singleton_grid_reduces_to_sequential_products() {
        let model = kernel(4);
        let grid = EnsembleGrid::sample(&model, 1, &RngStream::new(9, 0));
        let filter = forward_filter(&model, &grid);

        let mut log_weight_sum = model.log_initial_weight(grid.value(1, 0));
        for t in 2..=4 {
            log_weight_sum += model.log_transition_weight(t, grid.value(t - 1, 0), grid.value(t, 0));
        }
        assert_eq!(filter.log_z_hat(), log_weight_sum, "estimate must reduce bitwise");

        let log_z_bar = bounding_recursion(&model, &grid, &[0, 0, 0, 0]);
        let mut log_bound_sum = model.log_initial_bound();
        for t in 2..=4 {
            log_bound_sum += model.log_transition_bound(t);
        }
        assert_eq!(log_z_bar, log_bound_sum, "bound must reduce bitwise");
    }

    #[test]
    fn singleton_columns_are_plain_stream_draws() {
        let model = kernel(3);
        let small = EnsembleGrid::sample(&model, 1, &RngStream::new(17, 0));
        let large = EnsembleGrid::sample(&model, 6, &RngStream::new(17, 0));
        for t in 1..=3 {
            assert_eq!(small.value(t, 0), large.value(t, 0), "column {t} prefix changed");
        }
    }

    #[test]
    fn degenerate_step_is_flagged_and_zeroes_the_estimate() {
        struct DeadStep;
        impl FeynmanKac for DeadStep {
            fn horizon(&self) -> usize {
                3
            }
            fn log_initial_weight(&self, _x: f64) -> f64 {
                -0.5
            }
            fn log_transition_weight_from_input(&self, t: usize, _p: f64, _x: f64) -> f64 {
                if t == 2 {
                    f64::NEG_INFINITY
                } else {
                    -0.1
                }
            }
            fn sample_proposal(&self, _t: usize, rng: &mut RngStream) -> f64 {
                rng.uniform()
            }
            fn log_initial_bound(&self) -> f64 {
                0.0
            }
            fn log_transition_bound(&self, _t: usize) -> f64 {
                0.0
            }
        }
        let grid = EnsembleGrid::sample(&DeadStep, 4, &RngStream::new(3, 0));
        let filter = forward_filter(&DeadStep, &grid);
        assert_eq!(filter.degenerate_step(), Some(2));
        assert_eq!(filter.log_z_hat(), f64::NEG_INFINITY);
    }

    #[test]
    #[should_panic(expected = "degenerate")]
    fn backward_sampling_rejects_degenerate_filters() {
        struct DeadStart;
        impl FeynmanKac for DeadStart {
            fn horizon(&self) -> usize {
                2
            }
            fn log_initial_weight(&self, _x: f64) -> f64 {
                f64::NEG_INFINITY
            }
            fn log_transition_weight_from_input(&self, _t: usize, _p: f64, _x: f64) -> f64 {
                0.0
            }
            fn sample_proposal(&self, _t: usize, rng: &mut RngStream) -> f64 {
                rng.uniform()
            }
            fn log_initial_bound(&self) -> f64 {
                0.0
            }
            fn log_transition_bound(&self, _t: usize) -> f64 {
                0.0
            }
        }
        let grid = EnsembleGrid::sample(&DeadStart, 2, &RngStream::new(0, 0));
        let filter = forward_filter(&DeadStart, &grid);
        backward_sample(&DeadStart, &grid, &filter, &RngStream::new(0, 1));
    }

    #[test]
    fn pass_costs_match_their_kernel_shapes() {
        use crate::model::CountingModel;
        let n = 5u64;
        let horizon = 4u64;
        let model = CountingModel::new(kernel(horizon as usize));
        let grid = EnsembleGrid::sample(&model, n as usize, &RngStream::new(2, 0));

        model.reset();
        let filter = forward_filter(&model, &grid);
        assert_eq!(model.counts(), (n, (horizon - 1) * n * n));

        model.reset();
        let draw = backward_sample(&model, &grid, &filter, &RngStream::new(2, 1));
        assert_eq!(model.counts(), (0, (horizon - 1) * n));

        model.reset();
        bounding_recursion(&model, &grid, &draw.indices);
        assert_eq!(model.counts(), (n - 1, (horizon - 1) * (n - 1) * (n - 1)));
    }
}
