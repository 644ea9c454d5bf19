//! The five proposal maps and their log acceptance ratios.
//!
//! A proposal takes the current position `q`, a standard Gaussian draw `G`
//! and a timestep `dt`, and returns the proposed position together with the
//! log ratio `alpha(q, q')` entering the acceptance rules. The ratio is the
//! negative log of `exp(-beta V(q')) T(q', q) / (exp(-beta V(q)) T(q, q'))`
//! where `T` is the transition density of the underlying scheme; keeping it
//! in log space means probability ratios are never exponentiated before the
//! acceptance rule.
//!
//! Schemes:
//! * `EulerMaruyama` — `q' = q - beta dt V'(q) + sqrt(2 dt) G` (MALA).
//! * `ModifiedHighOrder` — Euler-Maruyama plus corrections of order
//!   `dt^{3/2}` and `dt^2` built from `sigma = beta V''/3` and
//!   `F = (beta/6)(V''' - beta V'' V')`, with noise scaled by
//!   `(1 + dt sigma)^{-1/2}`. Cuts the rejection rate from `O(dt^{3/2})`
//!   to `O(dt^{5/2})` and the strong error from `dt^{3/4}` to `dt`.
//! * `ImplicitMidpoint` — `q' = q - beta dt V'((q + q')/2) + sqrt(2 dt) G`,
//!   solved by fixed-point iteration started from the Euler-Maruyama point.
//! * `PositionVerletHmc` — one position-Verlet step of the Hamiltonian
//!   `H(q, p) = V(q) + p^2/2` with random momentum `p = G / sqrt(beta)` and
//!   step `h = sqrt(2 beta dt)`; equivalent to
//!   `q' = q - beta dt V'(q + sqrt(2 dt) G / 2) + sqrt(2 dt) G`.
//! * `EulerMultiplicative` — Euler scheme for the dynamics with a
//!   position-dependent diffusion coefficient `M(q)`.

use crate::accept::{AcceptanceRule, SchemeBiasProfile};
use crate::model::{modified_coefficients, total_drift_mult, DiffusionCoeff1D, Model1D};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Convergence threshold of the midpoint fixed-point iteration.
pub const MIDPOINT_TOL: f64 = 1e-8;
/// Iteration cap; hitting it signals that `dt` is too large for the
/// contraction to hold.
pub const MIDPOINT_MAX_ITERS: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProposalKind {
    EulerMaruyama,
    ModifiedHighOrder,
    ImplicitMidpoint,
    PositionVerletHmc,
    /// Euler scheme for multiplicative noise; carries its diffusion
    /// coefficient. All other proposals assume `M = 1`.
    EulerMultiplicative(DiffusionCoeff1D),
}

impl ProposalKind {
    /// CLI names: `mala`, `modified`, `midpoint`, `hmc`, `mala-mult`.
    pub fn from_name(name: &str, diffusion: Option<DiffusionCoeff1D>) -> Option<Self> {
        match name {
            "mala" => Some(ProposalKind::EulerMaruyama),
            "modified" => Some(ProposalKind::ModifiedHighOrder),
            "midpoint" => Some(ProposalKind::ImplicitMidpoint),
            "hmc" => Some(ProposalKind::PositionVerletHmc),
            "mala-mult" => Some(ProposalKind::EulerMultiplicative(
                diffusion.unwrap_or(DiffusionCoeff1D::CosineSquared),
            )),
            _ => None,
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, ProposalKind::EulerMultiplicative(_))
    }
}

/// A proposal paired with an acceptance rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub kind: ProposalKind,
    pub rule: AcceptanceRule,
}

impl Scheme {
    pub fn new(kind: ProposalKind, rule: AcceptanceRule) -> Self {
        Self { kind, rule }
    }

    /// The `(a, alpha)` profile of the scheme: quadrature prefactor and
    /// order in `dt` of the self-diffusion bias.
    ///
    /// Additive noise: midpoint/Verlet proposals reach `dt^2` under Barker
    /// and `dt^{3/2}` under Metropolis; plain and modified Euler stay at
    /// order `dt` (the modified proposal improves the strong order, not the
    /// weak-type expansion). Multiplicative noise: `dt` under Barker,
    /// `sqrt(dt)` under Metropolis.
    pub fn bias_profile(&self) -> SchemeBiasProfile {
        let a = match self.rule {
            AcceptanceRule::MetropolisHastings => 1.0,
            AcceptanceRule::Barker => 0.5,
        };
        let alpha_bias = match (&self.kind, self.rule) {
            (ProposalKind::EulerMultiplicative(_), AcceptanceRule::MetropolisHastings) => 0.5,
            (ProposalKind::EulerMultiplicative(_), AcceptanceRule::Barker) => 1.0,
            (
                ProposalKind::ImplicitMidpoint | ProposalKind::PositionVerletHmc,
                AcceptanceRule::MetropolisHastings,
            ) => 1.5,
            (ProposalKind::ImplicitMidpoint | ProposalKind::PositionVerletHmc, AcceptanceRule::Barker) => {
                2.0
            }
            (ProposalKind::EulerMaruyama | ProposalKind::ModifiedHighOrder, _) => 1.0,
        };
        SchemeBiasProfile { a, alpha_bias }
    }
}

/// Result of one proposal evaluation. `q_proposed` is returned unwrapped;
/// projecting into the periodic cell is the chain's job.
#[derive(Clone, Copy, Debug)]
pub struct ProposalOutcome {
    pub q_proposed: f64,
    /// Log acceptance ratio `alpha_dt(q, q')`.
    pub alpha: f64,
    /// Fixed-point iterations used (0 for explicit schemes).
    pub fixed_point_iters: u32,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProposalError {
    #[error("midpoint fixed point did not converge within {max_iters} iterations (dt too large)")]
    MidpointNoConvergence { max_iters: u32 },
    #[error("modified proposal scale 1 + dt*sigma = {scale:.6e} is not positive (dt too large)")]
    ModifiedDegenerateScale { scale: f64 },
}

/// Log acceptance ratio of the midpoint proposal as a two-point function:
/// the quadratic parts of the forward and reverse transition densities
/// cancel, leaving `beta (V(q') - V(q) - V'((q+q')/2) (q' - q))`, which is
/// antisymmetric under swapping `q` and `q'` by construction.
pub fn midpoint_log_ratio(model: &Model1D, q: f64, q_new: f64) -> f64 {
    model.beta * (model.v(q_new) - model.v(q) - model.dv(0.5 * (q + q_new)) * (q_new - q))
}

/// One position-Verlet step: half drift, full kick, half drift.
pub fn verlet_step(model: &Model1D, q: f64, p: f64, h: f64) -> (f64, f64) {
    let q_half = q + 0.5 * h * p;
    let p_new = p - h * model.dv(q_half);
    let q_new = q_half + 0.5 * h * p_new;
    (q_new, p_new)
}

/// Evaluate the proposal map and its log acceptance ratio.
pub fn propose(
    kind: &ProposalKind,
    model: &Model1D,
    q: f64,
    g: f64,
    dt: f64,
) -> Result<ProposalOutcome, ProposalError> {
    debug_assert!(dt > 0.0);
    let beta = model.beta;
    let s = (2.0 * dt).sqrt();
    match kind {
        ProposalKind::EulerMaruyama => {
            let qp = q + dt * (-(beta * model.dv(q))) + s * g;
            // forward deviation q' - q + beta dt V'(q) equals sqrt(2 dt) G,
            // so its quadratic term is just G^2/2
            let rev = q - qp + beta * dt * model.dv(qp);
            let alpha = beta * (model.v(qp) - model.v(q)) + rev * rev / (4.0 * dt) - 0.5 * g * g;
            Ok(ProposalOutcome {
                q_proposed: qp,
                alpha,
                fixed_point_iters: 0,
            })
        }
        ProposalKind::ModifiedHighOrder => {
            let here = modified_coefficients(model, q);
            let scale_q = 1.0 + dt * here.sigma;
            if scale_q <= 0.0 {
                return Err(ProposalError::ModifiedDegenerateScale { scale: scale_q });
            }
            let qp = q + dt * (-beta * model.dv(q) + dt * here.f_corr) + s * g / scale_q.sqrt();
            let there = modified_coefficients(model, qp);
            let scale_p = 1.0 + dt * there.sigma;
            if scale_p <= 0.0 {
                // reverse transition density is undefined as well
                return Err(ProposalError::ModifiedDegenerateScale { scale: scale_p });
            }
            let rev = q - qp + dt * (beta * model.dv(qp) - dt * there.f_corr);
            // forward quadratic form reduces to G^2/2 exactly
            let alpha = beta * (model.v(qp) - model.v(q))
                - 0.5 * (scale_p.ln() - scale_q.ln())
                + rev * rev * scale_p / (4.0 * dt)
                - 0.5 * g * g;
            Ok(ProposalOutcome {
                q_proposed: qp,
                alpha,
                fixed_point_iters: 0,
            })
        }
        ProposalKind::ImplicitMidpoint => {
            let shift = q + s * g;
            let mut qp = shift + dt * (-(beta * model.dv(q)));
            let mut iters = 0u32;
            loop {
                let next = shift - beta * dt * model.dv(0.5 * (q + qp));
                iters += 1;
                let delta = (next - qp).abs();
                qp = next;
                if delta < MIDPOINT_TOL {
                    break;
                }
                if iters >= MIDPOINT_MAX_ITERS {
                    return Err(ProposalError::MidpointNoConvergence {
                        max_iters: MIDPOINT_MAX_ITERS,
                    });
                }
            }
            let alpha = midpoint_log_ratio(model, q, qp);
            Ok(ProposalOutcome {
                q_proposed: qp,
                alpha,
                fixed_point_iters: iters,
            })
        }
        ProposalKind::PositionVerletHmc => {
            let h = (2.0 * beta * dt).sqrt();
            let p = g / beta.sqrt();
            let (q_new, p_new) = verlet_step(model, q, p, h);
            let energy_old = model.v(q) + 0.5 * p * p;
            let energy_new = model.v(q_new) + 0.5 * p_new * p_new;
            let alpha = beta * (energy_new - energy_old);
            Ok(ProposalOutcome {
                q_proposed: q_new,
                alpha,
                fixed_point_iters: 0,
            })
        }
        ProposalKind::EulerMultiplicative(m) => {
            let qp = q + dt * total_drift_mult(model, m, q) + s * m.sqrt_value(q) * g;
            let m_q = m.value(q);
            let m_p = m.value(qp);
            let rev = q - qp - dt * total_drift_mult(model, m, qp);
            // |q' - q - dt F(q)|^2 / M(q) = 2 dt G^2, i.e. G^2/2 after /(4 dt)
            let alpha = beta * (model.v(qp) - model.v(q))
                + (rev * rev / m_p) / (4.0 * dt)
                - 0.5 * g * g
                + 0.5 * (m_p.ln() - m_q.ln());
            Ok(ProposalOutcome {
                q_proposed: qp,
                alpha,
                fixed_point_iters: 0,
            })
        }
    }
}

/// The Gaussian draw that maps `q_proposed` back onto `q` under the same
/// proposal family; used to check the detailed-balance antisymmetry
/// `alpha(q, q') = -alpha(q', q)`.
pub fn reverse_draw(
    kind: &ProposalKind,
    model: &Model1D,
    q: f64,
    outcome: &ProposalOutcome,
    g: f64,
    dt: f64,
) -> f64 {
    let beta = model.beta;
    let s = (2.0 * dt).sqrt();
    let qp = outcome.q_proposed;
    match kind {
        ProposalKind::EulerMaruyama => (q - qp + beta * dt * model.dv(qp)) / s,
        ProposalKind::ModifiedHighOrder => {
            let there = modified_coefficients(model, qp);
            let scale_p = 1.0 + dt * there.sigma;
            (q - qp + dt * (beta * model.dv(qp) - dt * there.f_corr)) * scale_p.sqrt() / s
        }
        ProposalKind::ImplicitMidpoint => (q - qp + beta * dt * model.dv(0.5 * (q + qp))) / s,
        ProposalKind::PositionVerletHmc => {
            // reverse move flips the final momentum
            let h = (2.0 * beta * dt).sqrt();
            let p = g / beta.sqrt();
            let (_, p_new) = verlet_step(model, q, p, h);
            -p_new * beta.sqrt()
        }
        ProposalKind::EulerMultiplicative(m) => {
            (q - qp - dt * total_drift_mult(model, m, qp)) / (s * m.sqrt_value(qp))
        }
    }
}
