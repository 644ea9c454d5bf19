//! Green-Kubo and Einstein estimators of the self-diffusion constant.
//!
//! Additive noise: `D = 1 - (beta^2 dt) Sigma`, where `Sigma` is the
//! truncated force autocorrelation `sum_n w_n E[V'(q^n) V'(q^0)]`. The
//! quadrature weights `w_n` depend on the scheme: plain MALA and the
//! modified proposal sum every lag with weight 1; midpoint/Verlet with
//! Metropolis halve the `n = 0` term; any proposal with Barker discards
//! `n = 0` and halves the rest (the factor `a = 1/2` compensating the
//! asymptotic acceptance rate 1/2).
//!
//! Multiplicative noise: `D = int M dmu - a dt sum_{n>=0} E[F(q^n) F(q^0)]`
//! with the total drift `F` as the observable and the Gibbs average of `M`
//! evaluated by quadrature.
//!
//! The Einstein route tracks the unperiodized displacement: the slope `s`
//! of `E[(Q^n - Q^0)^2]` against physical time `n dt` estimates the
//! mobility of the chain, and `D = s / (2 a)` in one dimension.

use super::{EstimatorError, DEFAULT_BURN_IN, REALIZATION_BLOCK, STREAMS_PER_REALIZATION};
use super::{DiffusionEstimate, DiffusionMethod};
use crate::accept::AcceptanceRule;
use crate::chain::{ChainState, RngStream};
use crate::model::{total_drift_mult, Model1D};
use crate::proposal::{ProposalKind, Scheme};
use crate::reference::{gibbs_average, QuadratureGrid};
use crate::stats::{linear_fit, par_block_map, RunningMoments};

/// Stream id reserved for the shared thermalization chain.
const THERMALIZATION_STREAM: u64 = u64::MAX;

/// Draw `count` equilibrated initial conditions: run a single chain at
/// `dt_thermalization`, discard `burn_in` steps, then subsample every
/// `stride` steps.
pub fn thermalized_initial_conditions(
    kind: &ProposalKind,
    rule: AcceptanceRule,
    model: &Model1D,
    dt_thermalization: f64,
    burn_in: u64,
    stride: u64,
    count: u64,
    seed: u64,
) -> Result<Vec<f64>, EstimatorError> {
    assert!(stride > 0);
    let mut rng = RngStream::new(seed, THERMALIZATION_STREAM);
    let mut state = ChainState::new(model.space, 0.0);
    for _ in 0..burn_in {
        let g = rng.normal();
        let u = rng.uniform();
        state.step(kind, rule, model, dt_thermalization, g, u)?;
    }
    let mut inits = Vec::with_capacity(count as usize);
    for _ in 0..count {
        for _ in 0..stride {
            let g = rng.normal();
            let u = rng.uniform();
            state.step(kind, rule, model, dt_thermalization, g, u)?;
        }
        inits.push(state.q);
    }
    Ok(inits)
}

#[derive(Clone, Debug)]
pub struct GreenKuboConfig {
    pub kind: ProposalKind,
    pub rule: AcceptanceRule,
    pub model: Model1D,
    pub dt: f64,
    /// Truncation time of the autocorrelation sum; `tau/dt` must be an
    /// integer.
    pub tau: f64,
    pub realizations: u64,
    pub subsample_stride: u64,
    pub dt_thermalization: f64,
    pub burn_in: u64,
}

impl GreenKuboConfig {
    /// Protocol defaults: truncation 0.6 (additive) or 2.0
    /// (multiplicative), thermalization at dt = 0.005 subsampled every 20
    /// steps after a 1e4-step burn-in.
    pub fn with_defaults(
        kind: ProposalKind,
        rule: AcceptanceRule,
        model: Model1D,
        dt: f64,
        realizations: u64,
    ) -> Self {
        let tau = if kind.is_multiplicative() { 2.0 } else { 0.6 };
        Self {
            kind,
            rule,
            model,
            dt,
            tau,
            realizations,
            subsample_stride: 20,
            dt_thermalization: 0.005,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    fn n_lags(&self) -> Result<u64, EstimatorError> {
        let ratio = self.tau / self.dt;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-6 {
            return Err(EstimatorError::Config(format!(
                "tau/dt = {ratio} is not a positive integer"
            )));
        }
        Ok(n as u64)
    }
}

/// Lag weights of the truncated Green-Kubo sum for a scheme.
fn lag_weights(scheme: Scheme) -> (f64, f64) {
    let a = scheme.bias_profile().a;
    if scheme.kind.is_multiplicative() {
        return (a, a);
    }
    match scheme.rule {
        AcceptanceRule::Barker => (0.0, a),
        AcceptanceRule::MetropolisHastings => match scheme.kind {
            ProposalKind::ImplicitMidpoint | ProposalKind::PositionVerletHmc => (0.5, 1.0),
            _ => (1.0, 1.0),
        },
    }
}

/// Estimate the self-diffusion constant from the truncated autocorrelation
/// of the drift observable, averaged over `realizations` equilibrated
/// chains. `NotThermalized` is not detectable and therefore not an error;
/// the burn-in of the thermalization chain is the only guard.
pub fn green_kubo_diffusion(
    cfg: &GreenKuboConfig,
    seed: u64,
) -> Result<DiffusionEstimate, EstimatorError> {
    let n_lags = cfg.n_lags()?;
    if cfg.realizations == 0 {
        return Err(EstimatorError::Config("realizations must be positive".into()));
    }
    let scheme = Scheme::new(cfg.kind, cfg.rule);
    let (w0, w_rest) = lag_weights(scheme);
    let model = cfg.model;
    let kind = cfg.kind;
    let rule = cfg.rule;
    let dt = cfg.dt;

    // constants of the estimator: D = c0 - c1 * mean(per-realization sum)
    let (c0, c1) = match &kind {
        ProposalKind::EulerMultiplicative(m) => {
            let int_m = gibbs_average(&model, QuadratureGrid::default(), |q| m.value(q));
            (int_m, dt)
        }
        _ => (1.0, model.beta * model.beta * dt),
    };
    let observable = move |q: f64| -> f64 {
        match &kind {
            ProposalKind::EulerMultiplicative(m) => total_drift_mult(&model, m, q),
            _ => model.dv(q),
        }
    };

    let inits = thermalized_initial_conditions(
        &kind,
        rule,
        &model,
        cfg.dt_thermalization,
        cfg.burn_in,
        cfg.subsample_stride,
        cfg.realizations,
        seed,
    )?;

    let blocks = par_block_map(cfg.realizations, REALIZATION_BLOCK, |range| {
        let mut acc = RunningMoments::new();
        for i in range {
            let mut rng = RngStream::new(seed, i * STREAMS_PER_REALIZATION);
            let mut state = ChainState::new(model.space, inits[i as usize]);
            let phi0 = observable(state.q);
            let mut sum = w0 * phi0 * phi0;
            for _ in 1..=n_lags {
                let g = rng.normal();
                let u = rng.uniform();
                if let Err(e) = state.step(&kind, rule, &model, dt, g, u) {
                    return Err(EstimatorError::from(e));
                }
                sum += w_rest * observable(state.q) * phi0;
            }
            acc.push(sum);
        }
        Ok(acc)
    });
    let mut total = RunningMoments::new();
    for b in blocks {
        total.merge(&b?);
    }
    Ok(DiffusionEstimate {
        dt,
        method: DiffusionMethod::GreenKubo,
        value: c0 - c1 * total.mean(),
        std_error: c1 * total.std_error(),
    })
}

#[derive(Clone, Debug)]
pub struct EinsteinConfig {
    pub kind: ProposalKind,
    pub rule: AcceptanceRule,
    pub model: Model1D,
    pub dt: f64,
    pub n_steps: u64,
    pub realizations: u64,
    /// Steps `[start, end)` of the mean-square-displacement fit window.
    pub fit_window: (u64, u64),
    pub subsample_stride: u64,
    pub dt_thermalization: f64,
    pub burn_in: u64,
}

impl EinsteinConfig {
    /// Protocol defaults: fit over the last 90% of the run (the first 10%
    /// is transient), thermalization subsampled every 1000 steps.
    pub fn with_defaults(
        kind: ProposalKind,
        rule: AcceptanceRule,
        model: Model1D,
        dt: f64,
        n_steps: u64,
        realizations: u64,
    ) -> Self {
        Self {
            kind,
            rule,
            model,
            dt,
            n_steps,
            realizations,
            fit_window: (n_steps / 10, n_steps),
            subsample_stride: 1000,
            dt_thermalization: 0.005,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

/// Estimate the self-diffusion constant from the growth of the mean square
/// displacement. Each realization contributes the least-squares slope of
/// `(Q^n - Q^0)^2` against `n dt` over the fit window; slopes are averaged
/// over realizations and normalized by `2a`.
pub fn einstein_diffusion(
    cfg: &EinsteinConfig,
    seed: u64,
) -> Result<DiffusionEstimate, EstimatorError> {
    let (fit_start, fit_end) = cfg.fit_window;
    if fit_end > cfg.n_steps || fit_start >= fit_end {
        return Err(EstimatorError::Config(format!(
            "fit window [{fit_start}, {fit_end}) must lie within [0, {}]",
            cfg.n_steps
        )));
    }
    if cfg.realizations == 0 {
        return Err(EstimatorError::Config("realizations must be positive".into()));
    }
    let a = Scheme::new(cfg.kind, cfg.rule).bias_profile().a;
    let model = cfg.model;
    let kind = cfg.kind;
    let rule = cfg.rule;
    let dt = cfg.dt;
    let record_stride = (cfg.n_steps / 256).max(1);

    let inits = thermalized_initial_conditions(
        &kind,
        rule,
        &model,
        cfg.dt_thermalization,
        cfg.burn_in,
        cfg.subsample_stride,
        cfg.realizations,
        seed,
    )?;

    let blocks = par_block_map(cfg.realizations, REALIZATION_BLOCK, |range| {
        let mut acc = RunningMoments::new();
        let mut times = Vec::new();
        let mut msd = Vec::new();
        for i in range {
            let mut rng = RngStream::new(seed, i * STREAMS_PER_REALIZATION);
            let mut state = ChainState::new(model.space, inits[i as usize]);
            times.clear();
            msd.clear();
            for n in 1..=cfg.n_steps {
                let g = rng.normal();
                let u = rng.uniform();
                if let Err(e) = state.step(&kind, rule, &model, dt, g, u) {
                    return Err(EstimatorError::from(e));
                }
                if n % record_stride == 0 && n >= fit_start && n <= fit_end {
                    times.push(n as f64 * dt);
                    msd.push(state.displacement * state.displacement);
                }
            }
            let slope = linear_fit(&times, &msd).slope;
            acc.push(slope / (2.0 * a));
        }
        Ok(acc)
    });
    let mut total = RunningMoments::new();
    for b in blocks {
        total.merge(&b?);
    }
    Ok(DiffusionEstimate {
        dt,
        method: DiffusionMethod::Einstein,
        value: total.mean(),
        std_error: total.std_error(),
    })
}
