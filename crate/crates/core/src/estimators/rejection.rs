//! Rejection-rate scaling in the timestep.
//!
//! One long equilibrium chain per timestep; the acceptance accumulators of
//! [`ChainState`] are converted into the three empirical averages of
//! interest: `mean(1 - A)` for Metropolis chains, and both
//! `|mean(2A - 1)|` and `mean|2A - 1|` for Barker chains. Standard errors
//! come from batch means to absorb the serial correlation of the chain.

use super::{EstimatorError, StudyResult, DEFAULT_BURN_IN};
use crate::accept::AcceptanceRule;
use crate::chain::{ChainState, RngStream};
use crate::model::Model1D;
use crate::proposal::ProposalKind;
use crate::stats::RunningMoments;
use rayon::prelude::*;

const N_BATCHES: u64 = 100;

/// The series a rejection study can produce; which ones are present
/// depends on the acceptance rule the chain was run with.
#[derive(Clone, Debug)]
pub struct RejectionScalingResult {
    /// `mean(1 - A^MH)` per timestep.
    pub metropolis: Option<StudyResult>,
    /// `|mean(2 A^Barker - 1)|` per timestep.
    pub barker_mean: Option<StudyResult>,
    /// `mean |2 A^Barker - 1|` per timestep.
    pub barker_abs: Option<StudyResult>,
}

struct PointStats {
    one_minus_a: (f64, f64),
    two_a_minus_one: (f64, f64),
    abs_two_a_minus_one: (f64, f64),
}

fn run_point(
    kind: &ProposalKind,
    rule: AcceptanceRule,
    model: &Model1D,
    dt: f64,
    n_steps: u64,
    seed: u64,
    stream: u64,
) -> Result<PointStats, EstimatorError> {
    let mut rng = RngStream::new(seed, stream);
    let mut state = ChainState::new(model.space, 0.0);
    for _ in 0..DEFAULT_BURN_IN {
        let g = rng.normal();
        let u = rng.uniform();
        state.step(kind, rule, model, dt, g, u)?;
    }
    state.reset_statistics();

    let batch_len = (n_steps / N_BATCHES).max(1);
    let mut batches_one = RunningMoments::new();
    let mut batches_two = RunningMoments::new();
    let mut batches_abs = RunningMoments::new();
    let mut done = 0u64;
    while done < n_steps {
        let this_batch = batch_len.min(n_steps - done);
        let before = (
            state.sum_one_minus_a,
            state.sum_two_a_minus_one,
            state.sum_abs_two_a_minus_one,
        );
        for _ in 0..this_batch {
            let g = rng.normal();
            let u = rng.uniform();
            state.step(kind, rule, model, dt, g, u)?;
        }
        let len = this_batch as f64;
        batches_one.push((state.sum_one_minus_a - before.0) / len);
        batches_two.push((state.sum_two_a_minus_one - before.1) / len);
        batches_abs.push((state.sum_abs_two_a_minus_one - before.2) / len);
        done += this_batch;
    }
    Ok(PointStats {
        one_minus_a: (state.mean_one_minus_a(), batches_one.std_error()),
        two_a_minus_one: (state.mean_two_a_minus_one(), batches_two.std_error()),
        abs_two_a_minus_one: (state.mean_abs_two_a_minus_one(), batches_abs.std_error()),
    })
}

/// Measure the rejection-rate scalings over a timestep grid.
///
/// Expected log-log slopes at equilibrium: for additive noise, 3/2 for
/// `mean(1 - A^MH)` with the midpoint/Verlet proposals (5/2 for the
/// modified proposal), 3 for `|mean(2A - 1)|` and 3/2 for `mean|2A - 1|`
/// under Barker; for multiplicative noise, 1/2, 1 and 1/2 respectively.
pub fn rejection_scaling_study(
    kind: &ProposalKind,
    rule: AcceptanceRule,
    model: &Model1D,
    dt_values: &[f64],
    n_steps: u64,
    seed: u64,
) -> Result<RejectionScalingResult, EstimatorError> {
    if dt_values.is_empty() {
        return Err(EstimatorError::Config("dt_values must not be empty".into()));
    }
    if n_steps < N_BATCHES {
        return Err(EstimatorError::Config(format!(
            "need at least {N_BATCHES} steps for batch-mean errors"
        )));
    }
    let points: Vec<Result<PointStats, EstimatorError>> = dt_values
        .par_iter()
        .enumerate()
        .map(|(idx, &dt)| run_point(kind, rule, model, dt, n_steps, seed, idx as u64))
        .collect();
    let mut one = (Vec::new(), Vec::new());
    let mut two = (Vec::new(), Vec::new());
    let mut abs = (Vec::new(), Vec::new());
    for p in points {
        let p = p?;
        one.0.push(p.one_minus_a.0);
        one.1.push(p.one_minus_a.1);
        two.0.push(p.two_a_minus_one.0.abs());
        two.1.push(p.two_a_minus_one.1);
        abs.0.push(p.abs_two_a_minus_one.0);
        abs.1.push(p.abs_two_a_minus_one.1);
    }
    let dts = dt_values.to_vec();
    match rule {
        AcceptanceRule::MetropolisHastings => Ok(RejectionScalingResult {
            metropolis: Some(StudyResult::from_points(dts, one.0, one.1)),
            barker_mean: None,
            barker_abs: None,
        }),
        AcceptanceRule::Barker => Ok(RejectionScalingResult {
            metropolis: None,
            barker_mean: Some(StudyResult::from_points(dts.clone(), two.0, two.1)),
            barker_abs: Some(StudyResult::from_points(dts, abs.0, abs.1)),
        }),
    }
}
