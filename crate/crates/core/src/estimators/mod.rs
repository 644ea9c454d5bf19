//! The empirical studies: strong-error order, rejection-rate scaling,
//! Green-Kubo and Einstein self-diffusion, and asymptotic-variance
//! comparison. Each study fans realizations out over fixed index blocks and
//! merges mergeable accumulators in block order, so results are identical
//! for any worker count.

mod diffusion;
mod rejection;
mod strong_error;
mod variance;

pub use diffusion::{
    einstein_diffusion, green_kubo_diffusion, thermalized_initial_conditions, EinsteinConfig,
    GreenKuboConfig,
};
pub use rejection::{rejection_scaling_study, RejectionScalingResult};
pub use strong_error::{coupling_errors, strong_error_study, StrongErrorConfig};
pub use variance::{asymptotic_variance_of_time_average, asymptotic_variance_ratio};

use crate::chain::ChainError;
use crate::stats::{log_log_fit, LinearFit};
use serde::Serialize;
use thiserror::Error;

/// Burn-in discarded before any equilibrium statistics are collected.
pub const DEFAULT_BURN_IN: u64 = 10_000;

/// Streams reserved per realization index; purposes within a realization
/// (main chain, initial condition, per-level coarse uniforms) are offsets.
pub(crate) const STREAMS_PER_REALIZATION: u64 = 16;

/// Block length for deterministic parallel fan-out.
pub(crate) const REALIZATION_BLOCK: u64 = 1024;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("invalid study configuration: {0}")]
    Config(String),
    #[error("fewer than 3 estimates exceed 2 standard errors; bias order is not resolvable")]
    InsufficientSignal,
}

impl From<crate::proposal::ProposalError> for EstimatorError {
    fn from(e: crate::proposal::ProposalError) -> Self {
        EstimatorError::Chain(ChainError::Proposal(e))
    }
}

/// Per-timestep estimates with uncertainty and a log-log slope fit.
#[derive(Clone, Debug, Serialize)]
pub struct StudyResult {
    pub dt_values: Vec<f64>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub fit_slope: f64,
    pub fit_intercept: f64,
}

impl StudyResult {
    /// Assemble a result and fit `log(estimate)` against `log(dt)` over the
    /// strictly positive estimates. With fewer than two usable points the
    /// fit is NaN.
    pub fn from_points(dt_values: Vec<f64>, estimates: Vec<f64>, std_errors: Vec<f64>) -> Self {
        assert_eq!(dt_values.len(), estimates.len());
        assert_eq!(dt_values.len(), std_errors.len());
        let (xs, ys): (Vec<f64>, Vec<f64>) = dt_values
            .iter()
            .zip(&estimates)
            .filter(|(_, &e)| e > 0.0)
            .map(|(&d, &e)| (d, e))
            .unzip();
        let fit = if xs.len() >= 2 {
            log_log_fit(&xs, &ys)
        } else {
            LinearFit {
                slope: f64::NAN,
                intercept: f64::NAN,
            }
        };
        Self {
            dt_values,
            estimates,
            std_errors,
            fit_slope: fit.slope,
            fit_intercept: fit.intercept,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiffusionMethod {
    GreenKubo,
    Einstein,
}

/// A self-diffusion estimate at one timestep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiffusionEstimate {
    pub dt: f64,
    pub method: DiffusionMethod,
    pub value: f64,
    pub std_error: f64,
}

/// Fit the bias order: least squares of `log |D_dt - D_ref|` against
/// `log dt` over the estimates whose deviation from `D_ref` exceeds twice
/// their standard error. Noise-dominated points are dropped; fewer than
/// three survivors is an `InsufficientSignal` error.
pub fn bias_order_fit(
    estimates: &[DiffusionEstimate],
    d_ref: f64,
) -> Result<LinearFit, EstimatorError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for e in estimates {
        let dev = (e.value - d_ref).abs();
        if dev > 2.0 * e.std_error && dev > 0.0 {
            xs.push(e.dt);
            ys.push(dev);
        }
    }
    if xs.len() < 3 {
        return Err(EstimatorError::InsufficientSignal);
    }
    Ok(log_log_fit(&xs, &ys))
}
