//! Exact posterior path sampling for state-space models via ensemble
//! rejection sampling.
//!
//! A single rejection-sampling trial proposes a whole grid of candidate
//! states (`N` per time step), selects one path through the grid by
//! forward filtering and backward sampling, and accepts that path with a
//! probability formed from two normalizing-constant estimates: `z_hat`,
//! estimated on the grid, and a dominating `z_bar` obtained by replacing
//! the weights touching the selected path with their analytic bounds.
//! Accepted paths are exact draws from the posterior, and the acceptance
//! rate approaches one as the ensemble size grows, which makes rejection
//! sampling practical for long horizons where the classical single-draw
//! variant is hopeless.
//!
//! # Example: exact draws from a conditioned random walk
//!
//! ```
//! use ers::models::ConditionedRandomWalk;
//! use ers::{ers_sample, RngStream};
//!
//! let model = ConditionedRandomWalk::new(20);
//! let rng = RngStream::new(7, 0);
//! let result = ers_sample(&model, 40, &rng, Some(10_000));
//! let path = result.outcome.value().expect("trial budget was generous");
//! assert_eq!(path.len(), 20);
//! assert!(path.iter().all(|x| (0.0..=1.0).contains(x)));
//! ```
//!
//! # Example: acceptance-rate estimation
//!
//! ```
//! use ers::models::ConditionedRandomWalk;
//! use ers::{estimate_acceptance, RngStream};
//!
//! let model = ConditionedRandomWalk::new(10);
//! let estimate = estimate_acceptance(&model, 50, 200, &RngStream::new(1, 0));
//! assert!(estimate.mean_ratio > 0.0 && estimate.mean_ratio <= 1.0);
//! ```
//!
//! The crate is organized around a handful of pieces:
//!
//! - [`FeynmanKac`]: the model contract. Implementations provide proposal
//!   samplers, log incremental weights, and analytic weight bounds.
//! - [`static_ers`]: the single-variable sampler, useful on its own and as
//!   the reference point for the path sampler.
//! - [`ensemble`]: grid sampling, the forward filter, backward path
//!   selection, and the bound recursion (the `O(N^2 T)` kernels).
//! - [`dynamic`]: trial drivers, acceptance-rate estimation, and the
//!   ensemble-size lower bound on the acceptance rate.
//! - [`models`]: ready-made models (conditioned random walk, nonlinear
//!   autoregression, stochastic volatility, finite-state test models), a
//!   dense-grid oracle, and data simulators.
//! - [`experiment`]: reproducible experiment configs, CSV output, and the
//!   plumbing behind the `ers` binary.
//!
//! Every random quantity flows from a [`RngStream`] keyed by `(seed,
//! stream)`, so runs are reproducible bit-for-bit regardless of thread
//! count.

pub mod dynamic;
pub mod ensemble;
pub mod experiment;
pub mod model;
pub mod models;
pub mod numeric;
pub mod rng;
pub mod static_ers;
pub mod stats;

pub use dynamic::{
    ers_sample, ers_trial, estimate_acceptance, standard_rs_trial, theory_bounds,
    AcceptanceEstimate, DynamicSampleResult, TheoryBounds, TrialRecord,
};
pub use ensemble::{
    backward_sample, bounding_recursion, forward_filter, EnsembleGrid, ForwardFilter, ProposalDraw,
};
pub use experiment::{
    emit_samples, load_config, run_experiment, EnsembleSize, Estimator, ExperimentConfig,
    ExperimentError, ModelChoice, Overrides, ResultRow,
};
pub use model::{
    evaluate_path_weight, CountingModel, FeynmanKac, PathWeight, SampleOutcome, StaticTarget,
};
pub use rng::RngStream;
pub use static_ers::{
    estimate_static_acceptance, static_ers_sample, static_ers_trial, static_rs_sample,
    static_rs_trial, StaticSampleResult, StaticTrialRecord,
};
