//! Markov-chain stepping engine.
//!
//! One step draws a Gaussian increment `G` and a uniform `U` (in that
//! order, so switching acceptance rules never shifts the Gaussian
//! sequence), applies propose -> accept, and tracks both the periodized
//! position `q` and the unperiodized displacement `Q`. Rejections count
//! the current state again: `q` and `Q` stay put, which is exactly what
//! keeps the Gibbs measure invariant.

use crate::accept::{acceptance_probability, decide, AcceptanceRule};
use crate::model::{wrap_position, Model1D, Space};
use crate::proposal::{propose, ProposalError, ProposalKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

/// Seedable, splittable source of Gaussian and uniform draws.
///
/// A stream is identified by `(seed, stream_id)`; identical pairs yield
/// identical draw sequences across runs and thread counts, and distinct
/// `stream_id`s (one per realization) give statistically independent
/// sequences. Backed by ChaCha12, whose 64-bit stream parameter provides
/// the split.
#[derive(Clone, Debug)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error(transparent)]
    Proposal(#[from] ProposalError),
    #[error("increment list of length {len} is not divisible by coarsening factor {k}")]
    LengthNotDivisible { len: usize, k: usize },
}

/// State of one Markov chain, including the acceptance statistics that the
/// rejection-rate studies read off as empirical averages.
#[derive(Clone, Debug, Serialize)]
pub struct ChainState {
    /// Current position, wrapped into the space.
    pub q: f64,
    /// Unperiodized displacement `Q`: the sum of accepted increments,
    /// never wrapped.
    pub displacement: f64,
    pub n_steps: u64,
    pub n_accepted: u64,
    pub sum_one_minus_a: f64,
    pub sum_two_a_minus_one: f64,
    pub sum_abs_two_a_minus_one: f64,
}

/// Per-step outcome returned by [`ChainState::step`].
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub accepted: bool,
    /// Acceptance probability of this step.
    pub acceptance: f64,
    /// Accepted increment `delta` (0 on rejection).
    pub increment: f64,
}

impl ChainState {
    pub fn new(space: Space, q0: f64) -> Self {
        let q = wrap_position(space, q0);
        Self {
            q,
            displacement: 0.0,
            n_steps: 0,
            n_accepted: 0,
            sum_one_minus_a: 0.0,
            sum_two_a_minus_one: 0.0,
            sum_abs_two_a_minus_one: 0.0,
        }
    }

    /// Zero the step counters and acceptance accumulators, keeping the
    /// position; used to discard burn-in.
    pub fn reset_statistics(&mut self) {
        self.displacement = 0.0;
        self.n_steps = 0;
        self.n_accepted = 0;
        self.sum_one_minus_a = 0.0;
        self.sum_two_a_minus_one = 0.0;
        self.sum_abs_two_a_minus_one = 0.0;
    }

    /// Advance the chain by one step with the supplied draws.
    pub fn step(
        &mut self,
        kind: &ProposalKind,
        rule: AcceptanceRule,
        model: &Model1D,
        dt: f64,
        g: f64,
        u: f64,
    ) -> Result<StepInfo, ProposalError> {
        let out = propose(kind, model, self.q, g, dt)?;
        let acceptance = acceptance_probability(rule, out.alpha);
        let accepted = decide(acceptance, u);
        let mut increment = 0.0;
        if accepted {
            increment = out.q_proposed - self.q;
            self.displacement += increment;
            self.q = wrap_position(model.space, out.q_proposed);
            self.n_accepted += 1;
        }
        self.n_steps += 1;
        self.sum_one_minus_a += 1.0 - acceptance;
        let dev = 2.0 * acceptance - 1.0;
        self.sum_two_a_minus_one += dev;
        self.sum_abs_two_a_minus_one += dev.abs();
        Ok(StepInfo {
            accepted,
            acceptance,
            increment,
        })
    }

    pub fn mean_one_minus_a(&self) -> f64 {
        self.sum_one_minus_a / self.n_steps as f64
    }

    pub fn mean_two_a_minus_one(&self) -> f64 {
        self.sum_two_a_minus_one / self.n_steps as f64
    }

    pub fn mean_abs_two_a_minus_one(&self) -> f64 {
        self.sum_abs_two_a_minus_one / self.n_steps as f64
    }

    pub fn acceptance_fraction(&self) -> f64 {
        self.n_accepted as f64 / self.n_steps as f64
    }

    /// Accumulator summary in the dump schema.
    pub fn summary(&self) -> ChainSummary {
        ChainSummary {
            n_steps: self.n_steps,
            n_accepted: self.n_accepted,
            mean_one_minus_a: self.mean_one_minus_a(),
            mean_two_a_minus_one: self.mean_two_a_minus_one(),
            mean_abs_two_a_minus_one: self.mean_abs_two_a_minus_one(),
        }
    }
}

/// JSON dump of the chain accumulators.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChainSummary {
    pub n_steps: u64,
    pub n_accepted: u64,
    #[serde(rename = "mean_one_minus_A")]
    pub mean_one_minus_a: f64,
    #[serde(rename = "mean_two_A_minus_one")]
    pub mean_two_a_minus_one: f64,
    #[serde(rename = "mean_abs_two_A_minus_one")]
    pub mean_abs_two_a_minus_one: f64,
}

/// What `run_trajectory` keeps in memory; explicit so that 1e7-step runs
/// stay bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordPolicy {
    None,
    /// Record `(q, Q)` at step 0 and every m-th step thereafter.
    EveryNth(u64),
    /// Keep only the per-step accepted increments.
    IncrementsOnly,
}

/// Recorded output of a trajectory run.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub n_steps: u64,
    /// Recording stride; 0 when no states were recorded.
    pub stride: u64,
    /// Wrapped positions at steps `0, stride, 2*stride, ...`.
    pub states: Vec<f64>,
    /// Unperiodized displacement at the same steps.
    pub displacements: Vec<f64>,
    pub increments: Option<Vec<f64>>,
}

/// Run `n_steps` steps, consuming exactly one `(G, U)` pair per step,
/// Gaussian first.
pub fn run_trajectory(
    mut state: ChainState,
    kind: &ProposalKind,
    rule: AcceptanceRule,
    model: &Model1D,
    dt: f64,
    n_steps: u64,
    rng: &mut RngStream,
    record: RecordPolicy,
) -> Result<(ChainState, Trajectory), ChainError> {
    let stride = match record {
        RecordPolicy::EveryNth(m) => {
            assert!(m > 0, "recording stride must be positive");
            m
        }
        _ => 0,
    };
    let mut traj = Trajectory {
        dt,
        n_steps,
        stride,
        states: Vec::new(),
        displacements: Vec::new(),
        increments: match record {
            RecordPolicy::IncrementsOnly => Some(Vec::with_capacity(n_steps as usize)),
            _ => None,
        },
    };
    if let RecordPolicy::EveryNth(_) = record {
        traj.states.push(state.q);
        traj.displacements.push(state.displacement);
    }
    for n in 0..n_steps {
        let g = rng.normal();
        let u = rng.uniform();
        let info = state.step(kind, rule, model, dt, g, u)?;
        match record {
            RecordPolicy::EveryNth(m) if (n + 1) % m == 0 => {
                traj.states.push(state.q);
                traj.displacements.push(state.displacement);
            }
            RecordPolicy::IncrementsOnly => {
                traj.increments.as_mut().unwrap().push(info.increment);
            }
            _ => {}
        }
    }
    Ok((state, traj))
}

/// Coarsen a sequence of reference Gaussian increments by blocks of `k`:
/// `G_k^m = (1/sqrt(k)) sum_{n = mk}^{(m+1)k - 1} G_ref^n`, which are again
/// standard normal and consistent with the same Brownian path.
pub fn coarsen_increments(g_ref: &[f64], k: usize) -> Result<Vec<f64>, ChainError> {
    assert!(k > 0);
    if g_ref.len() % k != 0 {
        return Err(ChainError::LengthNotDivisible {
            len: g_ref.len(),
            k,
        });
    }
    let scale = 1.0 / (k as f64).sqrt();
    Ok(g_ref
        .chunks_exact(k)
        .map(|block| block.iter().sum::<f64>() * scale)
        .collect())
}

/// Write a recorded trajectory as RFC-4180 CSV with header `step,q,Q`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: &mut W) -> io::Result<()> {
    assert!(
        traj.states.len() == traj.displacements.len(),
        "inconsistent trajectory"
    );
    write!(out, "step,q,Q\r\n")?;
    for (i, (&q, &disp)) in traj.states.iter().zip(&traj.displacements).enumerate() {
        let step = i as u64 * traj.stride.max(1);
        write!(out, "{},{:.16e},{:.16e}\r\n", step, q, disp)?;
    }
    Ok(())
}

/// Serialize the accumulator summary as JSON.
pub fn write_summary_json<W: Write>(state: &ChainState, out: &mut W) -> io::Result<()> {
    let json = serde_json::to_string_pretty(&state.summary()).expect("summary serializes");
    out.write_all(json.as_bytes())
}
