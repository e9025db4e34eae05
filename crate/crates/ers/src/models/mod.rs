//! Ready-made sequential targets.
//!
//! Each model here packages proposals, incremental weights, and genuine
//! weight bounds behind [`crate::model::FeynmanKac`]:
//!
//! * [`ConditionedRandomWalk`] — a Gaussian walk conditioned to stay in an
//!   interval; the classic stress test for plain rejection, whose
//!   acceptance rate decays exponentially in the horizon.
//! * [`NonlinearAr`] — a tanh-drift autoregression observed in Gaussian
//!   noise; posterior path sampling given recorded observations.
//! * [`StochasticVolatility`] — a log-volatility chain driving the scale
//!   of observed returns, proposed through an exact change of variables.
//! * [`FiniteState`] — tabulated weights on a finite state space, small
//!   enough to enumerate exactly; the reference point for exactness tests.
//!
//! [`simulate`] draws synthetic observation records for the two observed
//! models, and [`oracle`] computes exact posterior step marginals by
//! quadrature (or enumeration, for the finite model) to test samplers
//! against.

mod conditioned_rw;
mod finite_state;
mod nonlinear_ar;
pub mod oracle;
pub mod simulate;
mod stoch_vol;

pub use conditioned_rw::ConditionedRandomWalk;
pub use finite_state::FiniteState;
pub use nonlinear_ar::NonlinearAr;
pub use stoch_vol::StochasticVolatility;

/// Log density of a normal distribution, written out once.
pub(crate) fn log_normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Log of the normal density's peak value, `ln N(mean; mean, sd^2)`.
pub(crate) fn log_normal_peak(sd: f64) -> f64 {
    -(sd.ln()) - 0.5 * (2.0 * std::f64::consts::PI).ln()
}
