//! Acceptance suite: one test per core guarantee of the library, each
//! ending in a single `criterion N: PASS` line (visible with
//! `--nocapture`). The tests share a lock so that the timing-sensitive
//! checks never run concurrently with other work in this process.
//!
//! The heavyweight rows (long horizons at large ensembles) are gated
//! behind `--ignored`, mirroring the runner's `--extended` flag.

mod common;

use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use common::{brute_log_z_bar, brute_log_z_hat, equal_mass_bins, bin_probs, rel_close};
use ers::models::oracle::grid_oracle;
use ers::models::simulate::{simulate_nonlinear_ar, simulate_stoch_vol};
use ers::models::{ConditionedRandomWalk, FiniteState, NonlinearAr, StochasticVolatility};
use ers::stats::{chi_square_test, mean_and_se};
use ers::{
    backward_sample, bounding_recursion, ers_trial, estimate_acceptance, forward_filter,
    standard_rs_trial, static_ers_trial, theory_bounds, CountingModel, EnsembleGrid, FeynmanKac,
    RngStream, StaticTarget, TrialRecord,
};

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Domination slack for comparing the two normalizer estimates: the
/// inequality is exact term by term, so only accumulated rounding may
/// separate them.
fn dominates(record: &TrialRecord) -> bool {
    if record.degenerate {
        return record.log_z_bar == f64::INFINITY && record.ratio == 0.0;
    }
    let slack = 1e-12 * record.log_z_hat.abs().max(record.log_z_bar.abs()).max(1.0);
    record.log_z_hat <= record.log_z_bar + slack
}

// ---------------------------------------------------------------------
// Criterion 1: the acceptance-rate table at horizon 100.
// ---------------------------------------------------------------------

#[test]
fn criterion_1_conditioned_walk_table_at_t_100() {
    let _lock = serial();
    let started = Instant::now();
    let model = ConditionedRandomWalk::new(100);
    let mut observed = Vec::new();
    for (n, target, tolerance) in [(100, 3.19, 1.0), (200, 17.29, 2.0), (500, 49.00, 3.0)] {
        let est = estimate_acceptance(&model, n, 500, &RngStream::new(42, 0));
        let percent = 100.0 * est.mean_ratio;
        assert!(
            (percent - target).abs() <= tolerance,
            "N={n}: acceptance {percent:.2}% missed the reference {target}% by more than {tolerance}"
        );
        observed.push(format!("N={n}: {percent:.2}% (ref {target}%)"));
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "table reproduction took {elapsed:.0} s, over the 10-minute budget");
    println!(
        "criterion 1: PASS — {} in {elapsed:.0} s",
        observed.join(", ")
    );
}

// ---------------------------------------------------------------------
// Criterion 2: acceptance is stable in the horizon at fixed N/T.
// ---------------------------------------------------------------------

#[test]
fn criterion_2_acceptance_stable_as_horizon_grows() {
    let _lock = serial();
    // The frequency estimator at this sample count sets the comparison
    // scale; both runs keep N = 2T. Distinct seeds keep the two
    // estimates independent (a shared seed would share accept coins).
    let sample = |t: usize, seed: u64| {
        let model = ConditionedRandomWalk::new(t);
        estimate_acceptance(&model, 2 * t, 150, &RngStream::new(seed, 0))
    };
    let short = sample(100, 101);
    let long = sample(250, 102);
    let gap = (short.frequency - long.frequency).abs();
    let combined =
        (short.frequency_std_error.powi(2) + long.frequency_std_error.powi(2)).sqrt();
    assert!(
        gap <= 3.0 * combined,
        "acceptance moved from {:.3} (T=100) to {:.3} (T=250): gap {gap:.4} > 3 x {combined:.4}",
        short.frequency,
        long.frequency
    );
    println!(
        "criterion 2: PASS — N=2T acceptance {:.1}% at T=100 vs {:.1}% at T=250 (3 s.e. = {:.1} pts)",
        100.0 * short.frequency,
        100.0 * long.frequency,
        300.0 * combined
    );
}

/// The optional longer-horizon row; run with `--ignored`.
#[test]
#[ignore = "extended: adds the T=500 stability row (roughly 15 minutes)"]
fn criterion_2_extended_t_500_row() {
    let _lock = serial();
    let sample = |t: usize| {
        let model = ConditionedRandomWalk::new(t);
        estimate_acceptance(&model, 2 * t, 100, &RngStream::new(42, 0))
    };
    let mid = sample(250);
    let long = sample(500);
    let gap = (mid.frequency - long.frequency).abs();
    let combined = (mid.frequency_std_error.powi(2) + long.frequency_std_error.powi(2)).sqrt();
    assert!(gap <= 3.0 * combined);
    println!(
        "criterion 2 (extended): PASS — {:.1}% at T=250 vs {:.1}% at T=500",
        100.0 * mid.frequency,
        100.0 * long.frequency
    );
}

// ---------------------------------------------------------------------
// Criterion 3a: acceptance rises with the ensemble size on the
// autoregressive model.
// ---------------------------------------------------------------------

#[test]
fn criterion_3a_autoregression_acceptance_increases_with_n() {
    let _lock = serial();
    let record = simulate_nonlinear_ar(0.9, 0.3, 0.1, 100, &mut RngStream::new(11, 1 << 49)).1;
    let model = NonlinearAr::new(record).unwrap();
    let estimates: Vec<_> = [100usize, 200, 500]
        .iter()
        .map(|&n| estimate_acceptance(&model, n, 200, &RngStream::new(7, 0)))
        .collect();
    for pair in estimates.windows(2) {
        let rise = pair[1].mean_ratio - pair[0].mean_ratio;
        let combined = (pair[0].std_error.powi(2) + pair[1].std_error.powi(2)).sqrt();
        assert!(
            rise > 3.0 * combined,
            "acceptance should rise by more than 3 s.e.: rise {rise:.5} vs 3 x {combined:.5}"
        );
    }
    println!(
        "criterion 3a: PASS — T=100 acceptance {:.2}% -> {:.2}% -> {:.2}% across N = T, 2T, 5T",
        100.0 * estimates[0].mean_ratio,
        100.0 * estimates[1].mean_ratio,
        100.0 * estimates[2].mean_ratio
    );
}

// ---------------------------------------------------------------------
// Criterion 3b: accepted volatility paths have the posterior marginals.
// ---------------------------------------------------------------------

#[test]
fn criterion_3b_volatility_marginals_match_dense_oracle() {
    let _lock = serial();
    // A mild synthetic record keeps the per-accepted-path cost desk
    // scale; the check itself (sampled marginals against an independent
    // dense-grid computation under the same model) is record-agnostic.
    let record = simulate_stoch_vol(0.5, 0.5, 0.7, 50, &mut RngStream::new(5, 1 << 49)).1;
    let model = StochasticVolatility::with_parameters(0.3, 2.5, 0.7, record).unwrap();
    let horizon = model.horizon();
    let n = 100;

    let oracle = grid_oracle(&model, (-16.0, 12.0), 2048);
    for row in &oracle.marginals {
        assert!(
            row[0] < 1e-9 && row[row.len() - 1] < 1e-9,
            "oracle grid truncates posterior mass; widen the support"
        );
    }

    let wanted = 5_000usize;
    let root = RngStream::new(9, 0);
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(wanted);
    let mut trials = 0u64;
    for k in 0.. {
        trials += 1;
        if let (Some(path), _) = ers_trial(&model, n, &root.substream(k)) {
            accepted.push(path);
            if accepted.len() == wanted {
                break;
            }
        }
    }

    let bins = 16;
    let mut worst: Option<(usize, f64, f64)> = None;
    for t in 1..=horizon {
        let marginal = &oracle.marginals[t - 1];
        let assignment = equal_mass_bins(marginal, bins);
        let expected = bin_probs(marginal, &assignment, bins);
        let mut counts = vec![0u64; bins];
        for path in &accepted {
            let cell = oracle
                .cell_of(path[t - 1])
                .expect("accepted state fell outside the oracle grid");
            counts[assignment[cell]] += 1;
        }
        let report = chi_square_test(&counts, &expected, 1e-3);
        assert!(
            report.passed,
            "step {t}: chi-square {:.2} over threshold {:.2} at alpha 1e-3",
            report.statistic, report.threshold
        );
        let margin = report.statistic / report.threshold;
        if worst.map_or(true, |(_, s, th): (usize, f64, f64)| margin > s / th) {
            worst = Some((t, report.statistic, report.threshold));
        }
    }
    let (t, stat, threshold) = worst.unwrap();
    println!(
        "criterion 3b: PASS — {wanted} accepted paths in {trials} trials; worst step {t}: \
         chi-square {stat:.1} < {threshold:.1} at alpha 1e-3"
    );
}

// ---------------------------------------------------------------------
// Criterion 4: the accepted-path law is exact on an enumerable model.
// ---------------------------------------------------------------------

#[test]
fn criterion_4_finite_state_joint_law_is_exact() {
    let _lock = serial();
    let model = FiniteState::random_instance(4, 3, &mut RngStream::new(77, 3));
    let m = model.num_states();
    let cells = m * m * m;

    // Enumerate the true joint law over all 64 paths.
    let mut weights = vec![0.0f64; cells];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                weights[(a * m + b) * m + c] = model.initial_weight(a)
                    * model.transition_weight(a, b)
                    * model.transition_weight(b, c);
            }
        }
    }
    let total: f64 = weights.iter().sum();
    let expected: Vec<f64> = weights.iter().map(|w| w / total).collect();

    let wanted = 10_000usize;
    let root = RngStream::new(4, 0);
    let mut counts = vec![0u64; cells];
    let mut trials = 0u64;
    let mut found = 0usize;
    for k in 0.. {
        trials += 1;
        if let (Some(path), _) = ers_trial(&model, 8, &root.substream(k)) {
            let index = path
                .iter()
                .fold(0usize, |acc, &x| acc * m + model.state_index(x));
            counts[index] += 1;
            found += 1;
            if found == wanted {
                break;
            }
        }
    }
    let report = chi_square_test(&counts, &expected, 1e-3);
    assert!(
        report.passed,
        "joint law over {cells} paths: chi-square {:.2} over threshold {:.2}",
        report.statistic, report.threshold
    );
    println!(
        "criterion 4: PASS — {wanted} accepted paths in {trials} trials; chi-square {:.1} < {:.1} \
         over all {cells} paths",
        report.statistic, report.threshold
    );
}

// ---------------------------------------------------------------------
// Criterion 5: the quadratic kernels equal their exponential-cost
// definitions.
// ---------------------------------------------------------------------

#[test]
fn criterion_5_kernels_match_brute_force_definitions() {
    let _lock = serial();
    let mut checked = 0u32;
    let mut largest = 0u128;
    for i in 0..100u64 {
        let mut rng = RngStream::new(1_000 + i, 0);
        let m = 2 + (rng.uniform() * 4.0) as usize; // states in 2..=5
        let t = 2 + (rng.uniform() * 4.0) as usize; // horizon in 2..=5
        let cap = (1e5f64.powf(1.0 / t as f64)).floor() as usize;
        let n = 2 + (rng.uniform() * (cap - 1) as f64) as usize;
        let paths = (n as u128).pow(t as u32);
        assert!(paths <= 100_000, "instance too large: {n}^{t}");
        largest = largest.max(paths);

        let model = FiniteState::random_instance(m, t, &mut rng);
        let grid = EnsembleGrid::sample(&model, n, &rng.substream(1));
        let filter = forward_filter(&model, &grid);
        let hat = filter.log_z_hat();
        let brute_hat = brute_log_z_hat(&model, &grid);
        assert!(
            rel_close(hat, brute_hat, 1e-10),
            "instance {i}: filter normalizer {hat} vs brute force {brute_hat}"
        );

        let draw = backward_sample(&model, &grid, &filter, &rng.substream(2));
        let bar = bounding_recursion(&model, &grid, &draw.indices);
        let brute_bar = brute_log_z_bar(&model, &grid, &draw.indices);
        assert!(
            rel_close(bar, brute_bar, 1e-10),
            "instance {i}: bound recursion {bar} vs brute force {brute_bar}"
        );
        assert!(hat <= bar + 1e-12 * bar.abs().max(1.0), "domination failed on instance {i}");
        checked += 1;
    }
    println!(
        "criterion 5: PASS — 100 random instances ({checked} checked, largest {largest} \
         index paths) match the exponential-cost definitions to 1e-10"
    );
}

// ---------------------------------------------------------------------
// Criterion 6: domination on every trial, and N = 1 collapses to plain
// rejection bit for bit.
// ---------------------------------------------------------------------

#[test]
fn criterion_6_domination_everywhere_and_unit_ensemble_equivalence() {
    let _lock = serial();
    let mut trials = 0u64;
    let mut check = |record: &TrialRecord| {
        assert!(dominates(record), "domination violated: {record:?}");
        trials += 1;
    };

    let walk = ConditionedRandomWalk::new(50);
    let root = RngStream::new(60, 0);
    for k in 0..500 {
        check(&ers_trial(&walk, 50, &root.substream(k)).1);
    }

    let ar_record = simulate_nonlinear_ar(0.9, 0.3, 0.1, 30, &mut RngStream::new(61, 1 << 49)).1;
    let ar = NonlinearAr::new(ar_record).unwrap();
    let root = RngStream::new(62, 0);
    for k in 0..300 {
        check(&ers_trial(&ar, 60, &root.substream(k)).1);
    }

    let sv_record = simulate_stoch_vol(0.5, 0.5, 0.7, 30, &mut RngStream::new(63, 1 << 49)).1;
    let sv = StochasticVolatility::with_parameters(0.3, 2.5, 0.7, sv_record).unwrap();
    let root = RngStream::new(64, 0);
    for k in 0..300 {
        check(&ers_trial(&sv, 60, &root.substream(k)).1);
    }

    for instance in 0..20 {
        let model = FiniteState::random_instance(3, 4, &mut RngStream::new(65, instance));
        let root = RngStream::new(66 + instance, 0);
        for k in 0..100 {
            check(&ers_trial(&model, 4, &root.substream(k)).1);
        }
    }

    // Unit ensembles: the whole pipeline must reproduce plain rejection
    // sampling exactly when sharing a stream, record fields included.
    let walk = ConditionedRandomWalk::new(10);
    let root = RngStream::new(67, 0);
    for k in 0..3000 {
        let sub = root.substream(k);
        let (ers_path, ers_record) = ers_trial(&walk, 1, &sub);
        let (rs_path, rs_record) = standard_rs_trial(&walk, &sub);
        assert_eq!(ers_record, rs_record, "records diverged on trial {k}");
        assert_eq!(ers_path, rs_path, "paths diverged on trial {k}");
        trials += 1;
    }
    let sv_record = simulate_stoch_vol(0.5, 0.5, 0.7, 6, &mut RngStream::new(68, 1 << 49)).1;
    let sv = StochasticVolatility::with_parameters(0.3, 2.5, 0.7, sv_record).unwrap();
    let root = RngStream::new(69, 0);
    for k in 0..1000 {
        let sub = root.substream(k);
        assert_eq!(ers_trial(&sv, 1, &sub), standard_rs_trial(&sv, &sub));
        trials += 1;
    }
    println!(
        "criterion 6: PASS — 0 domination violations across {trials} trials; \
         4000 unit-ensemble trials equal plain rejection bit for bit"
    );
}

// ---------------------------------------------------------------------
// Criterion 7: the grid normalizer estimate is unbiased.
// ---------------------------------------------------------------------

#[test]
fn criterion_7_normalizer_estimate_is_unbiased() {
    let _lock = serial();
    let model = FiniteState::random_instance(3, 4, &mut RngStream::new(55, 9));
    let exact = model.exact_log_z().exp();
    let root = RngStream::new(13, 0);
    let estimates: Vec<f64> = (0..100_000u64)
        .map(|k| {
            let grid = EnsembleGrid::sample(&model, 3, &root.substream(k));
            forward_filter(&model, &grid).log_z_hat().exp()
        })
        .collect();
    let est = mean_and_se(&estimates);
    let gap = (est.mean - exact).abs();
    assert!(
        gap <= 4.0 * est.std_error,
        "mean normalizer {:.8} vs exact {exact:.8}: gap {gap:.2e} > 4 s.e. {:.2e}",
        est.mean,
        4.0 * est.std_error
    );
    println!(
        "criterion 7: PASS — mean of 1e5 normalizer estimates {:.6} vs exact {exact:.6} \
         (|gap| = {:.1} s.e.)",
        est.mean,
        gap / est.std_error
    );
}

// ---------------------------------------------------------------------
// Criterion 8: the single-variable guarantee on an enumerable target.
// ---------------------------------------------------------------------

#[test]
fn criterion_8_static_guarantee_on_two_point_target() {
    let _lock = serial();
    let p_rs = 0.75; // plain-rejection acceptance of the two-point target

    // Exact ensemble acceptance by enumerating every grid and selection:
    // slot values are iid uniform over {0, 1} with weights 2 and 1.
    let exact_acceptance = |n: usize| -> f64 {
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let weights: Vec<f64> =
                (0..n).map(|i| if mask >> i & 1 == 0 { 2.0 } else { 1.0 }).collect();
            let sum: f64 = weights.iter().sum();
            let z_hat = sum / n as f64;
            for &w in &weights {
                let z_bar = (sum - w + 2.0) / n as f64;
                total += 0.5f64.powi(n as i32) * (w / sum) * (z_hat / z_bar);
            }
        }
        total
    };

    let mut lines = Vec::new();
    for n in [2usize, 4, 8] {
        let target = StaticTarget::two_point();
        let root = RngStream::new(8, n as u64);
        let ratios: Vec<f64> = (0..300_000u64)
            .map(|k| static_ers_trial(&target, n, &root.substream(k)).1.ratio)
            .collect();
        let est = mean_and_se(&ratios);
        let guarantee = n as f64 * p_rs / (1.0 + (n as f64 - 1.0) * p_rs);
        assert!(
            est.mean >= guarantee - 3.0 * est.std_error,
            "N={n}: estimate {:.5} under guarantee {guarantee:.5} - 3 s.e.",
            est.mean
        );
        let exact = exact_acceptance(n);
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.std_error,
            "N={n}: estimate {:.5} vs enumerated {exact:.5}",
            est.mean
        );
        if n == 2 {
            assert!(
                (exact - 0.875).abs() < 1e-12,
                "two-candidate enumeration should give exactly 7/8, got {exact}"
            );
        }
        lines.push(format!("N={n}: {:.4} >= {guarantee:.4}", est.mean));
    }
    println!(
        "criterion 8: PASS — {}; N=2 estimate matches the enumerated 0.875",
        lines.join(", ")
    );
}

// ---------------------------------------------------------------------
// Criterion 9: the ensemble-size guarantee for path sampling.
// ---------------------------------------------------------------------

#[test]
fn criterion_9_dynamic_guarantee_on_conditioned_walk() {
    let _lock = serial();
    let model = ConditionedRandomWalk::new(20);
    let mut lines = Vec::new();
    for n in [200usize, 400] {
        let bounds = theory_bounds(&model, n).expect("bounded weights admit a guarantee");
        assert!(bounds.lower_bound >= 0.0 && bounds.lower_bound < 1.0);
        assert!(bounds.log_lower_bound.is_finite());
        let est = estimate_acceptance(&model, n, 300, &RngStream::new(3, 0));
        assert!(
            est.mean_ratio + 3.0 * est.std_error >= bounds.lower_bound,
            "N={n}: estimate {:.4} + 3 s.e. sits under the guarantee {:.3e}",
            est.mean_ratio,
            bounds.lower_bound
        );
        lines.push(format!(
            "N={n}: {:.1}% >= {:.1e}%",
            100.0 * est.mean_ratio,
            100.0 * bounds.lower_bound
        ));
    }
    println!("criterion 9: PASS — T=20 acceptance dominates its guarantee ({})", lines.join(", "));
}

// ---------------------------------------------------------------------
// Criterion 10: quadratic work, counted exactly and timed.
// ---------------------------------------------------------------------

#[test]
fn criterion_10_cost_is_quadratic_in_the_ensemble() {
    let _lock = serial();
    // Exact evaluation counts for a forward pass.
    for (t, n) in [(7usize, 5usize), (3, 9), (100, 10)] {
        let counting = CountingModel::new(ConditionedRandomWalk::new(t));
        let grid = EnsembleGrid::sample(&counting, n, &RngStream::new(31, 0));
        forward_filter(&counting, &grid);
        let (initial, transition) = counting.counts();
        assert_eq!(
            (initial, transition),
            (n as u64, ((t - 1) * n * n) as u64),
            "forward pass at T={t}, N={n} must evaluate N + (T-1)N^2 weights exactly"
        );
    }

    // Wall time of the full per-trial pipeline across doubled ensembles.
    let model = ConditionedRandomWalk::new(100);
    let per_trial = |n: usize, reps: u64| -> f64 {
        let root = RngStream::new(32, n as u64);
        ers_trial(&model, n, &root.substream(u64::MAX)); // warm up
        let started = Instant::now();
        for k in 0..reps {
            ers_trial(&model, n, &root.substream(k));
        }
        started.elapsed().as_secs_f64() / reps as f64
    };
    let t250 = per_trial(250, 24);
    let t500 = per_trial(500, 10);
    let t1000 = per_trial(1000, 5);
    for (ratio, label) in [(t500 / t250, "500/250"), (t1000 / t500, "1000/500")] {
        assert!(
            (2.0..=8.0).contains(&ratio),
            "doubling N should quadruple the time within 2x: {label} ratio {ratio:.2}"
        );
    }
    println!(
        "criterion 10: PASS — forward passes count N + (T-1)N^2 exactly; per-trial wall time \
         {:.0} ms -> {:.0} ms -> {:.0} ms across N = 250, 500, 1000",
        1e3 * t250,
        1e3 * t500,
        1e3 * t1000
    );
}
