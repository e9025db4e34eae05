//! Batch experiment running: config files, acceptance-rate tables, and
//! accepted-path emission.
//!
//! A run is described by an [`ExperimentConfig`] — assembled from an
//! optional TOML file plus command-line [`Overrides`] — and produces
//! either CSV rows of acceptance estimates ([`run_experiment`]) or a file
//! of accepted paths ([`emit_samples`]). All randomness descends from the
//! configured seed through labelled substreams, so outputs are identical
//! for identical configs no matter how many worker threads run the
//! trials.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;
use thiserror::Error;

use crate::dynamic::{ers_sample, estimate_acceptance};
use crate::model::{FeynmanKac, ModelError, SampleOutcome};
use crate::models::simulate::{simulate_nonlinear_ar, simulate_stoch_vol};
use crate::models::{ConditionedRandomWalk, FiniteState, NonlinearAr, StochasticVolatility};
use crate::rng::RngStream;

/// Stream id for synthetic-data generation, outside the label ranges the
/// samplers use for trials.
const DATA_STREAM: u64 = 1 << 49;

/// Weight-evaluation budget an un-flagged run may not exceed (roughly the
/// largest of the standard table cells). Costlier runs need `extended`.
const DESK_BUDGET: f64 = 2.5e10;

/// Everything that can go wrong assembling or running an experiment.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot parse config file: {0}")]
    ConfigSyntax(#[from] toml::de::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    DataFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which model an experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelChoice {
    ConditionedRw,
    NonlinearAr,
    StochVol,
    FiniteState,
}

impl ModelChoice {
    pub const NAMES: &'static str = "conditioned-rw, nonlinear-ar, stoch-vol, finite-state";

    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::ConditionedRw => "conditioned-rw",
            ModelChoice::NonlinearAr => "nonlinear-ar",
            ModelChoice::StochVol => "stoch-vol",
            ModelChoice::FiniteState => "finite-state",
        }
    }
}

impl std::str::FromStr for ModelChoice {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conditioned-rw" => Ok(ModelChoice::ConditionedRw),
            "nonlinear-ar" => Ok(ModelChoice::NonlinearAr),
            "stoch-vol" => Ok(ModelChoice::StochVol),
            "finite-state" => Ok(ModelChoice::FiniteState),
            other => Err(ExperimentError::Config(format!(
                "unknown model {other:?}; expected one of: {}",
                ModelChoice::NAMES
            ))),
        }
    }
}

/// Which acceptance estimator the result rows report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    /// Mean of the per-trial `z_hat / z_bar` ratios (lower variance).
    RatioMean,
    /// Fraction of trials actually accepted.
    Frequency,
    /// One row for each.
    Both,
}

impl std::str::FromStr for Estimator {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ratio-mean" => Ok(Estimator::RatioMean),
            "frequency" => Ok(Estimator::Frequency),
            "both" => Ok(Estimator::Both),
            other => Err(ExperimentError::Config(format!(
                "unknown estimator {other:?}; expected ratio-mean, frequency, or both"
            ))),
        }
    }
}

/// Ensemble size, either fixed or tied to the horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnsembleSize {
    /// Use exactly `n` candidates per step.
    Absolute(usize),
    /// Use `ceil(beta * T)` candidates per step.
    Scaled(f64),
}

impl EnsembleSize {
    /// Concrete candidate count for a horizon of `t` steps.
    pub fn resolve(self, t: usize) -> usize {
        match self {
            EnsembleSize::Absolute(n) => n,
            EnsembleSize::Scaled(beta) => (beta * t as f64).ceil() as usize,
        }
    }
}

/// Model parameters from the config file's `[model]` section.
///
/// Every field is optional; models fall back to their standard values.
/// `beta` here is the return scale of the volatility model — the
/// ensemble-size `beta` lives in the `[experiment]` section.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub support: Option<(f64, f64)>,
    pub sigma: Option<f64>,
    pub phi: Option<f64>,
    pub sigma_v: Option<f64>,
    pub sigma_w: Option<f64>,
    pub beta: Option<f64>,
    pub initial: Option<Vec<f64>>,
    pub transitions: Option<Vec<Vec<f64>>>,
}

/// A fully resolved experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelChoice,
    pub horizon: usize,
    pub ensemble: EnsembleSize,
    pub num_samples: u64,
    pub estimator: Estimator,
    pub seed: u64,
    /// Worker threads for the trial pool; `0` means one per core.
    pub workers: usize,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub extended: bool,
    /// Trial budget per requested path in [`emit_samples`].
    pub max_trials_per_path: u64,
    pub model_params: ModelParams,
}

/// Command-line values layered on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<ModelChoice>,
    pub horizon: Option<usize>,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub data: Option<PathBuf>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub estimator: Option<Estimator>,
    pub extended: bool,
}

/// The config file's `[experiment]` section, all optional at parse time.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    model: Option<String>,
    t: Option<usize>,
    n: Option<usize>,
    beta: Option<f64>,
    samples: Option<u64>,
    estimator: Option<String>,
    seed: Option<u64>,
    workers: Option<usize>,
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    extended: Option<bool>,
    max_trials_per_path: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    experiment: ExperimentSection,
    #[serde(default)]
    model: ModelParams,
}

/// Assembles a config from an optional TOML file and flag overrides.
///
/// Flags win over file values. The model and horizon must come from
/// somewhere; exactly one of `n` and `beta` must determine the ensemble
/// size (a flag for either replaces both file values).
pub fn load_config(
    file: Option<&Path>,
    overrides: Overrides,
) -> Result<ExperimentConfig, ExperimentError> {
    let parsed: ConfigFile = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            toml::from_str(&text)?
        }
        None => ConfigFile::default(),
    };
    let section = parsed.experiment;

    let model = match overrides.model {
        Some(m) => m,
        None => match &section.model {
            Some(name) => name.parse()?,
            None => {
                return Err(ExperimentError::Config(format!(
                    "no model given; pass --model or set it in the config (one of: {})",
                    ModelChoice::NAMES
                )))
            }
        },
    };
    let horizon = overrides
        .horizon
        .or(section.t)
        .ok_or_else(|| ExperimentError::Config("no horizon given; pass --t".into()))?;
    if horizon == 0 {
        return Err(ExperimentError::Config("the horizon must be at least 1".into()));
    }

    let ensemble = match (overrides.n, overrides.beta) {
        (Some(_), Some(_)) => {
            return Err(ExperimentError::Config(
                "pass either --n or --beta, not both".into(),
            ))
        }
        (Some(n), None) => EnsembleSize::Absolute(n),
        (None, Some(beta)) => EnsembleSize::Scaled(beta),
        (None, None) => match (section.n, section.beta) {
            (Some(_), Some(_)) => {
                return Err(ExperimentError::Config(
                    "the config sets both n and beta; keep one".into(),
                ))
            }
            (Some(n), None) => EnsembleSize::Absolute(n),
            (None, Some(beta)) => EnsembleSize::Scaled(beta),
            (None, None) => {
                return Err(ExperimentError::Config(
                    "no ensemble size given; pass --n or --beta".into(),
                ))
            }
        },
    };
    if ensemble.resolve(horizon) == 0 {
        return Err(ExperimentError::Config("the ensemble size must be at least 1".into()));
    }

    let estimator = match overrides.estimator {
        Some(e) => e,
        None => match &section.estimator {
            Some(name) => name.parse()?,
            None => Estimator::RatioMean,
        },
    };
    let num_samples = overrides.samples.or(section.samples).unwrap_or(500);
    if num_samples == 0 {
        return Err(ExperimentError::Config("need at least one sample".into()));
    }

    Ok(ExperimentConfig {
        model,
        horizon,
        ensemble,
        num_samples,
        estimator,
        seed: overrides.seed.or(section.seed).unwrap_or(0),
        workers: overrides.workers.or(section.workers).unwrap_or(0),
        data: overrides.data.or(section.data),
        out: overrides.out.or(section.out),
        extended: overrides.extended || section.extended.unwrap_or(false),
        max_trials_per_path: section.max_trials_per_path.unwrap_or(10_000),
        model_params: parsed.model,
    })
}

/// Reads an observation CSV: a `index,value` header, then one observation
/// per line in index order (starting at 0 or 1).
pub fn read_observations(path: &Path) -> Result<Vec<f64>, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let err = |line: usize, message: String| ExperimentError::DataFormat {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "index,value" => {}
        Some((_, header)) => {
            return Err(err(1, format!("expected header \"index,value\", found {header:?}")))
        }
        None => return Err(err(1, "the file is empty".into())),
    }
    let mut values = Vec::new();
    let mut base: Option<usize> = None;
    for (number, line) in lines {
        let line_no = number + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (index_text, value_text) = trimmed
            .split_once(',')
            .ok_or_else(|| err(line_no, "expected two comma-separated fields".into()))?;
        let index: usize = index_text
            .trim()
            .parse()
            .map_err(|_| err(line_no, format!("invalid index {:?}", index_text.trim())))?;
        let value: f64 = value_text
            .trim()
            .parse()
            .map_err(|_| err(line_no, format!("invalid value {:?}", value_text.trim())))?;
        if !value.is_finite() {
            return Err(err(line_no, format!("value {value} is not finite")));
        }
        let expected = *base.get_or_insert(index) + values.len();
        if index != expected {
            return Err(err(line_no, format!("index {index} out of order, expected {expected}")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(err(1, "no observations after the header".into()));
    }
    Ok(values)
}

/// Observations for an observed model: the first `horizon` rows of the
/// configured data file, or a synthetic record derived from the seed.
fn observations(
    config: &ExperimentConfig,
    params: (f64, f64, f64),
) -> Result<Vec<f64>, ExperimentError> {
    match &config.data {
        Some(path) => {
            let all = read_observations(path)?;
            if all.len() < config.horizon {
                return Err(ExperimentError::Config(format!(
                    "{} holds {} observations but the horizon is {}",
                    path.display(),
                    all.len(),
                    config.horizon
                )));
            }
            Ok(all[..config.horizon].to_vec())
        }
        None => {
            let mut rng = RngStream::new(config.seed, DATA_STREAM);
            let (a, b, c) = params;
            let observations = match config.model {
                ModelChoice::NonlinearAr => {
                    simulate_nonlinear_ar(a, b, c, config.horizon, &mut rng).1
                }
                ModelChoice::StochVol => simulate_stoch_vol(a, b, c, config.horizon, &mut rng).1,
                _ => unreachable!("only observed models take data"),
            };
            Ok(observations)
        }
    }
}

fn build_conditioned(config: &ExperimentConfig) -> Result<ConditionedRandomWalk, ExperimentError> {
    let p = &config.model_params;
    Ok(ConditionedRandomWalk::with_parameters(
        p.support.unwrap_or((0.0, 1.0)),
        p.sigma.unwrap_or(0.2),
        config.horizon,
    )?)
}

fn build_nonlinear(config: &ExperimentConfig) -> Result<NonlinearAr, ExperimentError> {
    let p = &config.model_params;
    let (phi, sigma_v, sigma_w) =
        (p.phi.unwrap_or(0.9), p.sigma_v.unwrap_or(0.3), p.sigma_w.unwrap_or(0.1));
    let data = observations(config, (phi, sigma_v, sigma_w))?;
    Ok(NonlinearAr::with_parameters(phi, sigma_v, sigma_w, data)?)
}

fn build_stoch(config: &ExperimentConfig) -> Result<StochasticVolatility, ExperimentError> {
    let p = &config.model_params;
    let (phi, sigma, beta) =
        (p.phi.unwrap_or(0.95), p.sigma.unwrap_or(0.3), p.beta.unwrap_or(0.7));
    let data = observations(config, (phi, sigma, beta))?;
    Ok(StochasticVolatility::with_parameters(phi, sigma, beta, data)?)
}

fn build_finite(config: &ExperimentConfig) -> Result<FiniteState, ExperimentError> {
    let p = &config.model_params;
    let initial = p.initial.clone().ok_or_else(|| {
        ExperimentError::Config(
            "finite-state requires initial weights in the [model] section".into(),
        )
    })?;
    let transitions = p.transitions.clone().ok_or_else(|| {
        ExperimentError::Config(
            "finite-state requires a transitions table in the [model] section".into(),
        )
    })?;
    Ok(FiniteState::new(initial, transitions, config.horizon)?)
}

/// Runs `body` with the configured model as a concrete type, so the hot
/// kernels monomorphize instead of dispatching through a vtable.
macro_rules! with_model {
    ($config:expr, |$model:ident| $body:expr) => {{
        let config = $config;
        match config.model {
            ModelChoice::ConditionedRw => {
                let $model = build_conditioned(config)?;
                $body
            }
            ModelChoice::NonlinearAr => {
                let $model = build_nonlinear(config)?;
                $body
            }
            ModelChoice::StochVol => {
                let $model = build_stoch(config)?;
                $body
            }
            ModelChoice::FiniteState => {
                let $model = build_finite(config)?;
                $body
            }
        }
    }};
}

/// Builds the configured model behind a trait object (for callers that
/// need dynamic typing; the runners themselves stay monomorphic).
pub fn build_model(config: &ExperimentConfig) -> Result<Box<dyn FeynmanKac>, ExperimentError> {
    match config.model {
        ModelChoice::ConditionedRw => Ok(Box::new(build_conditioned(config)?)),
        ModelChoice::NonlinearAr => Ok(Box::new(build_nonlinear(config)?)),
        ModelChoice::StochVol => Ok(Box::new(build_stoch(config)?)),
        ModelChoice::FiniteState => Ok(Box::new(build_finite(config)?)),
    }
}

/// Rough weight-evaluation count of the configured run.
fn estimated_cost(config: &ExperimentConfig) -> f64 {
    let n = config.ensemble.resolve(config.horizon) as f64;
    let t = config.horizon as f64;
    // Forward filter plus bounding recursion, per sample.
    config.num_samples as f64 * 2.0 * (n + (t - 1.0) * n * n)
}

/// One output row of [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub model: &'static str,
    pub horizon: usize,
    pub n: usize,
    pub estimator: &'static str,
    pub p_ers_percent: f64,
    pub std_error: f64,
    pub num_samples: u64,
    pub seed: u64,
    pub wall_time_s: f64,
}

/// The fixed CSV header rows are written under.
pub const CSV_HEADER: &str =
    "model,T,N,estimator,p_ers_percent,std_error,num_samples,seed,wall_time_s";

impl ResultRow {
    /// The row in CSV form (no trailing newline).
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{},{},{:.3}",
            self.model,
            self.horizon,
            self.n,
            self.estimator,
            self.p_ers_percent,
            self.std_error,
            self.num_samples,
            self.seed,
            self.wall_time_s
        )
    }
}

/// Renders a full CSV document from rows.
pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    for row in rows {
        let _ = write!(out, "\n{}", row.to_csv());
    }
    out.push('\n');
    out
}

/// Runs the configured acceptance-rate estimation.
///
/// Returns one row per requested estimator. The wall time is the shared
/// measurement of the single underlying trial sweep, so rows for the two
/// estimators of one run carry the same value.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    if estimated_cost(config) > DESK_BUDGET && !config.extended {
        return Err(ExperimentError::Config(format!(
            "this run needs about {:.1e} weight evaluations, past the desk-scale budget; \
             pass --extended to run it anyway",
            estimated_cost(config)
        )));
    }
    if config.num_samples < 2 {
        return Err(ExperimentError::Config(
            "acceptance estimation needs at least 2 samples".into(),
        ));
    }
    let n = config.ensemble.resolve(config.horizon);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot build worker pool: {e}")))?;

    let started = Instant::now();
    let estimate = with_model!(config, |model| pool.install(|| {
        estimate_acceptance(&model, n, config.num_samples, &RngStream::new(config.seed, 0))
    }));
    let wall_time_s = started.elapsed().as_secs_f64();

    let row = |estimator: &'static str, p: f64, se: f64| ResultRow {
        model: config.model.name(),
        horizon: config.horizon,
        n,
        estimator,
        p_ers_percent: 100.0 * p,
        std_error: 100.0 * se,
        num_samples: config.num_samples,
        seed: config.seed,
        wall_time_s,
    };
    let mut rows = Vec::new();
    if matches!(config.estimator, Estimator::RatioMean | Estimator::Both) {
        rows.push(row("ratio-mean", estimate.mean_ratio, estimate.std_error));
    }
    if matches!(config.estimator, Estimator::Frequency | Estimator::Both) {
        rows.push(row("frequency", estimate.frequency, estimate.frequency_std_error));
    }
    Ok(rows)
}

/// Summary of an [`emit_samples`] run.
#[derive(Clone, Debug, PartialEq)]
pub struct EmitSummary {
    pub requested: u64,
    pub written: u64,
    /// Path indices whose trial budget ran out before an acceptance.
    pub exhausted: Vec<u64>,
}

/// Writes `count` accepted paths as CSV text.
///
/// The header is `path_index,trials,x1,...,xT`; each written row holds
/// the number of trials the acceptance took and the path values. Path `i`
/// draws its trials from substream `i`, and paths whose budget
/// (`max_trials_per_path`) runs out are skipped and reported in the
/// summary, so a stingy budget thins the output but never biases it.
pub fn emit_samples(
    config: &ExperimentConfig,
    count: u64,
    out: &mut String,
) -> Result<EmitSummary, ExperimentError> {
    let n = config.ensemble.resolve(config.horizon);
    out.push_str("path_index,trials");
    for t in 1..=config.horizon {
        let _ = write!(out, ",x{t}");
    }
    out.push('\n');

    let root = RngStream::new(config.seed, 0);
    let mut summary = EmitSummary { requested: count, written: 0, exhausted: Vec::new() };
    with_model!(config, |model| {
        for path_index in 0..count {
            let result = ers_sample(
                &model,
                n,
                &root.substream(path_index),
                Some(config.max_trials_per_path),
            );
            match result.outcome {
                SampleOutcome::Accepted { value, trials } => {
                    let _ = write!(out, "{path_index},{trials}");
                    for x in value {
                        let _ = write!(out, ",{x}");
                    }
                    out.push('\n');
                    summary.written += 1;
                }
                SampleOutcome::Exhausted { .. } => summary.exhausted.push(path_index),
            }
        }
    });
    Ok(summary)
}
