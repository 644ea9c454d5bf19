//! Metropolized discretizations of overdamped Langevin dynamics in one
//! dimension, with estimators for the dynamical quantities the schemes are
//! judged on: strong trajectory error, rejection-rate scalings, and the
//! self-diffusion constant via Green-Kubo and Einstein formulas.
//!
//! The crate pairs five proposal maps (Euler-Maruyama, a high-order
//! modified Euler, implicit midpoint, position-Verlet, and an Euler scheme
//! for multiplicative noise) with two acceptance rules (Metropolis-Hastings
//! and Barker), and provides analytic references -- a linear-response
//! quadrature for the diffusion constant, the Lifson-Jackson formula, and a
//! Gauss-Hermite evaluation of the discrete generator -- to validate the
//! samplers without Monte Carlo noise where possible.

pub mod accept;
pub mod chain;
pub mod estimators;
pub mod model;
pub mod proposal;
pub mod reference;
pub mod stats;

pub use accept::{acceptance_probability, decide, AcceptanceRule, SchemeBiasProfile};
pub use chain::{ChainState, RecordPolicy, RngStream, Trajectory};
pub use model::{DiffusionCoeff1D, Model1D, Potential, Space};
pub use proposal::{propose, verlet_step, ProposalKind, ProposalOutcome, Scheme};
