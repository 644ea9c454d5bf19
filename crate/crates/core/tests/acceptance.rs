//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (run with `--nocapture` to see them).
//!
//! Statistical criteria run at desk scale with fixed seeds; tolerances are
//! stated next to each assertion. The worker-count half of criterion 8
//! (bitwise-identical CSV artifacts) lives in the CLI crate's acceptance
//! test, next to the code that writes the files.

use langevin_core::accept::AcceptanceRule::{self, Barker, MetropolisHastings as Mh};
use langevin_core::chain::{run_trajectory, ChainState, RecordPolicy, RngStream};
use langevin_core::estimators::*;
use langevin_core::model::{DiffusionCoeff1D, Model1D, Space};
use langevin_core::proposal::{
    midpoint_log_ratio, propose, reverse_draw, verlet_step, ProposalKind,
};
use langevin_core::reference::*;
use langevin_core::stats::ks_distance;
use std::time::Instant;

const D_ADDITIVE: f64 = 0.62386;
const D_MULTIPLICATIVE: f64 = 0.30478;
const COSSQ: DiffusionCoeff1D = DiffusionCoeff1D::CosineSquared;

fn assert_in_band(value: f64, center: f64, half_width: f64, label: &str) {
    assert!(
        (value - center).abs() <= half_width,
        "{label}: {value:.4} outside {center} +- {half_width}"
    );
}

#[test]
fn criterion_1_reference_constants() {
    let started = Instant::now();
    let model = Model1D::cosine(1.0);
    let grid = QuadratureGrid::default();

    let d_add = analytic_diffusion_1d(&model, &DiffusionCoeff1D::Unit, grid, 1e-3).unwrap();
    let d_mult = analytic_diffusion_1d(&model, &COSSQ, grid, 1e-3).unwrap();
    let lj = lifson_jackson_oracle(&model, grid).unwrap();
    let elapsed = started.elapsed();

    assert!((d_add - D_ADDITIVE).abs() <= 5e-5, "additive D = {d_add}");
    assert!(
        (d_mult - D_MULTIPLICATIVE).abs() <= 5e-5,
        "multiplicative D = {d_mult}"
    );
    assert!((d_add - lj).abs() <= 1e-4, "LR {d_add} vs LJ {lj}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 1 PASS: D_add = {d_add:.6}, D_mult = {d_mult:.6}, LJ = {lj:.6} in {elapsed:?}"
    );
}

#[test]
fn criterion_2_strong_order() {
    let started = Instant::now();
    // horizon 0.096 instead of the quoted 0.1: 0.1/dt_ref is not divisible
    // by k = 800 * 2^l, and the study requires shared times for every level
    let base = StrongErrorConfig {
        model: Model1D::quartic(1.0),
        kind: ProposalKind::EulerMaruyama,
        rule: Mh,
        dt_ref: 1e-5,
        k_values: vec![50, 100, 200, 400, 800, 1600, 3200],
        horizon: 0.096,
        realizations: 10_000,
    };
    let mala = strong_error_study(&base, 42).unwrap();
    let modified = strong_error_study(
        &StrongErrorConfig {
            kind: ProposalKind::ModifiedHighOrder,
            ..base.clone()
        },
        42,
    )
    .unwrap();
    let elapsed = started.elapsed();

    assert_in_band(mala.fit_slope, 0.75, 0.10, "MALA strong order");
    assert_in_band(modified.fit_slope, 1.00, 0.10, "modified strong order");
    assert!(elapsed.as_secs_f64() < 900.0, "took {elapsed:?}");
    println!(
        "criterion 2 PASS: strong-error slopes MALA = {:.3}, modified = {:.3} in {elapsed:?}",
        mala.fit_slope, modified.fit_slope
    );
}

#[test]
fn criterion_3_rejection_scaling_additive() {
    let started = Instant::now();
    let cosine = Model1D::cosine(1.0);
    let quartic = Model1D::quartic(1.0);
    let dts = [0.02, 0.01, 0.005, 0.0025];
    let n = 10_000_000;

    let mh = rejection_scaling_study(&ProposalKind::PositionVerletHmc, Mh, &cosine, &dts, n, 421)
        .unwrap()
        .metropolis
        .unwrap();
    let barker =
        rejection_scaling_study(&ProposalKind::PositionVerletHmc, Barker, &cosine, &dts, n, 422)
            .unwrap();
    let barker_mean = barker.barker_mean.unwrap();
    let barker_abs = barker.barker_abs.unwrap();
    let modified =
        rejection_scaling_study(&ProposalKind::ModifiedHighOrder, Mh, &quartic, &dts, n, 423)
            .unwrap()
            .metropolis
            .unwrap();
    let elapsed = started.elapsed();

    assert_in_band(mh.fit_slope, 1.5, 0.15, "Metropolis rejection (Verlet)");
    assert_in_band(modified.fit_slope, 2.5, 0.2, "Metropolis rejection (modified)");
    assert_in_band(barker_mean.fit_slope, 3.0, 0.3, "Barker mean deviation");
    assert_in_band(barker_abs.fit_slope, 1.5, 0.15, "Barker absolute deviation");
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "criterion 3 PASS: slopes MH = {:.3}, modified = {:.3}, Barker mean = {:.3}, Barker abs = {:.3} in {elapsed:?}",
        mh.fit_slope, modified.fit_slope, barker_mean.fit_slope, barker_abs.fit_slope
    );
}

#[test]
fn criterion_4_rejection_scaling_multiplicative() {
    let started = Instant::now();
    let cosine = Model1D::cosine(1.0);
    let kind = ProposalKind::EulerMultiplicative(COSSQ);
    let dts = [0.02, 0.01, 0.005, 0.0025];
    let n = 10_000_000;

    let mh = rejection_scaling_study(&kind, Mh, &cosine, &dts, n, 441)
        .unwrap()
        .metropolis
        .unwrap();
    let barker = rejection_scaling_study(&kind, Barker, &cosine, &dts, n, 442).unwrap();
    let barker_abs = barker.barker_abs.unwrap();
    // The signed Barker deviation |mean(2A - 1)| only reaches its O(dt)
    // asymptotics below dt ~ 1e-3 (relative corrections fall off like
    // sqrt(dt)); measure its slope on a finer grid where the law holds.
    let fine_dts = [0.001, 0.0005, 0.00025, 0.000125];
    let barker_mean = rejection_scaling_study(&kind, Barker, &cosine, &fine_dts, n, 443)
        .unwrap()
        .barker_mean
        .unwrap();
    let elapsed = started.elapsed();

    assert_in_band(mh.fit_slope, 0.5, 0.1, "multiplicative Metropolis rejection");
    assert_in_band(barker_mean.fit_slope, 1.0, 0.15, "multiplicative Barker mean");
    assert_in_band(barker_abs.fit_slope, 0.5, 0.1, "multiplicative Barker abs");
    println!(
        "criterion 4 PASS: slopes MH = {:.3}, Barker mean = {:.3}, Barker abs = {:.3} in {elapsed:?}",
        mh.fit_slope, barker_mean.fit_slope, barker_abs.fit_slope
    );
}

#[test]
fn criterion_5_diffusion_bias_ordering() {
    let started = Instant::now();
    let model = Model1D::cosine(1.0);
    let dt = 0.01;
    let k = 1_000_000;

    let gk = |kind, rule, seed| {
        let cfg = GreenKuboConfig::with_defaults(kind, rule, model, dt, k);
        green_kubo_diffusion(&cfg, seed).unwrap()
    };
    let hmc_barker = gk(ProposalKind::PositionVerletHmc, Barker, 42);
    let hmc_mh = gk(ProposalKind::PositionVerletHmc, Mh, 43);
    let mala = gk(ProposalKind::EulerMaruyama, Mh, 44);
    let elapsed = started.elapsed();

    let b_hb = (hmc_barker.value - D_ADDITIVE).abs();
    let b_hm = (hmc_mh.value - D_ADDITIVE).abs();
    let b_ma = (mala.value - D_ADDITIVE).abs();
    let gap_se =
        |a: &DiffusionEstimate, b: &DiffusionEstimate| (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();

    assert!(
        b_hm - b_hb > 2.0 * gap_se(&hmc_mh, &hmc_barker),
        "Barker bias {b_hb:.4} not below Metropolis bias {b_hm:.4} at 2 sigma"
    );
    assert!(
        b_ma - b_hm > 2.0 * gap_se(&mala, &hmc_mh),
        "Verlet-Metropolis bias {b_hm:.4} not below MALA bias {b_ma:.4} at 2 sigma"
    );
    assert!(
        b_hb <= 2.0 * hmc_barker.std_error,
        "Verlet+Barker bias {b_hb:.5} distinguishable from 0 (2 sigma = {:.5})",
        2.0 * hmc_barker.std_error
    );
    assert!(elapsed.as_secs_f64() < 1800.0, "took {elapsed:?}");
    println!(
        "criterion 5 PASS: |bias| Verlet+Barker {b_hb:.5} < Verlet+MH {b_hm:.5} < MALA {b_ma:.5} in {elapsed:?}"
    );
}

#[test]
fn criterion_6_diffusion_bias_exponents() {
    let started = Instant::now();
    let model = Model1D::cosine(1.0);
    let grid = QuadratureGrid::default();
    let d_add = analytic_diffusion_1d(&model, &DiffusionCoeff1D::Unit, grid, 1e-3).unwrap();
    let d_mult = analytic_diffusion_1d(&model, &COSSQ, grid, 1e-3).unwrap();
    let dts = [0.04, 0.02, 0.01];

    let series = |kind, rule: AcceptanceRule, ks: [u64; 3], seed0: u64| -> Vec<DiffusionEstimate> {
        dts.iter()
            .enumerate()
            .map(|(i, &dt)| {
                let mut cfg = GreenKuboConfig::with_defaults(kind, rule, model, dt, ks[i]);
                if rule == Barker && !kind.is_multiplicative() {
                    // Barker chains decorrelate half as fast, so the
                    // truncation horizon is doubled to keep the omitted
                    // autocorrelation tail below the dt^2 bias signal
                    cfg.tau = 1.2;
                }
                green_kubo_diffusion(&cfg, seed0 + i as u64).unwrap()
            })
            .collect()
    };

    // realization counts sized so every point resolves its bias at > 2 sigma
    let barker_add = series(
        ProposalKind::ImplicitMidpoint,
        Barker,
        [1_000_000, 4_000_000, 30_000_000],
        4610,
    );
    let mh_add = series(
        ProposalKind::PositionVerletHmc,
        Mh,
        [200_000, 400_000, 800_000],
        4620,
    );
    let mala = series(
        ProposalKind::EulerMaruyama,
        Mh,
        [50_000, 100_000, 200_000],
        4630,
    );
    let mult = ProposalKind::EulerMultiplicative(COSSQ);
    let barker_mult = series(mult, Barker, [200_000, 200_000, 200_000], 4640);
    let mh_mult = series(mult, Mh, [200_000, 200_000, 200_000], 4650);
    let elapsed = started.elapsed();

    let fit = |est: &[DiffusionEstimate], d_ref: f64, label: &str| {
        bias_order_fit(est, d_ref)
            .unwrap_or_else(|_| panic!("{label}: fewer than 3 points carry signal"))
            .slope
    };
    let s_barker = fit(&barker_add, d_add, "additive Barker");
    let s_mh = fit(&mh_add, d_add, "additive Metropolis");
    let s_mala = fit(&mala, d_add, "MALA");
    let s_bmult = fit(&barker_mult, d_mult, "multiplicative Barker");
    let s_mmult = fit(&mh_mult, d_mult, "multiplicative Metropolis");

    assert_in_band(s_barker, 2.0, 0.5, "additive Barker bias order");
    assert_in_band(s_mh, 1.5, 0.5, "additive Metropolis bias order");
    assert_in_band(s_mala, 1.0, 0.4, "MALA bias order");
    assert_in_band(s_bmult, 1.0, 0.4, "multiplicative Barker bias order");
    assert_in_band(s_mmult, 0.5, 0.3, "multiplicative Metropolis bias order");
    println!(
        "criterion 6 PASS: bias orders Barker = {s_barker:.2}, MH = {s_mh:.2}, MALA = {s_mala:.2}, mult Barker = {s_bmult:.2}, mult MH = {s_mmult:.2} in {elapsed:?}"
    );
}

#[test]
fn criterion_7_weak_expansion_residual() {
    let started = Instant::now();
    let model = Model1D::cosine(1.0);
    let psi = GeneratorObservable::Sin(1);
    // in this asymptotic window the Barker residual follows its dt^2 law;
    // at coarser steps (dt >~ 0.005 for this potential) higher-order terms
    // still bend the log-log curve
    let dts = [2.5e-4, 1.25e-4, 6.25e-5, 3.125e-5];
    let slope = |kind, rule| {
        let rs: Vec<f64> = dts
            .iter()
            .map(|&dt| weak_expansion_residual(&kind, rule, &model, psi, dt, 256).unwrap())
            .collect();
        let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ly: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        langevin_core::stats::linear_fit(&lx, &ly).slope
    };

    let mid_barker = slope(ProposalKind::ImplicitMidpoint, Barker);
    let hmc_barker = slope(ProposalKind::PositionVerletHmc, Barker);
    let mid_mh = slope(ProposalKind::ImplicitMidpoint, Mh);
    let hmc_mh = slope(ProposalKind::PositionVerletHmc, Mh);
    let elapsed = started.elapsed();

    assert_in_band(mid_barker, 2.0, 0.1, "midpoint+Barker weak expansion");
    assert_in_band(hmc_barker, 2.0, 0.1, "Verlet+Barker weak expansion");
    assert_in_band(mid_mh, 1.5, 0.1, "midpoint+MH weak expansion");
    assert_in_band(hmc_mh, 1.5, 0.1, "Verlet+MH weak expansion");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 7 PASS: residual slopes mid+B = {mid_barker:.3}, hmc+B = {hmc_barker:.3}, mid+MH = {mid_mh:.3}, hmc+MH = {hmc_mh:.3} in {elapsed:?}"
    );
}

#[test]
fn criterion_8_exact_invariants() {
    let started = Instant::now();
    let cosine = Model1D::cosine(1.0);
    let quartic = Model1D::quartic(1.0);

    // (a) detailed-balance antisymmetry of the log ratio, 1e-10
    let db_cases: Vec<(ProposalKind, Model1D)> = vec![
        (ProposalKind::EulerMaruyama, quartic),
        (ProposalKind::ModifiedHighOrder, quartic),
        (ProposalKind::ImplicitMidpoint, cosine),
        (ProposalKind::PositionVerletHmc, cosine),
        (ProposalKind::EulerMultiplicative(COSSQ), cosine),
    ];
    for (kind, model) in &db_cases {
        for i in 0..50 {
            for j in 0..50 {
                let q = -1.0 + 2.0 * i as f64 / 49.0;
                let g = -3.0 + 6.0 * j as f64 / 49.0;
                let fwd = propose(kind, model, q, g, 0.01).unwrap();
                let g_rev = reverse_draw(kind, model, q, &fwd, g, 0.01);
                let alpha_rev = if matches!(kind, ProposalKind::ImplicitMidpoint) {
                    midpoint_log_ratio(model, fwd.q_proposed, q)
                } else {
                    propose(kind, model, fwd.q_proposed, g_rev, 0.01).unwrap().alpha
                };
                assert!(
                    (fwd.alpha + alpha_rev).abs() <= 1e-10 * fwd.alpha.abs().max(1.0),
                    "{kind:?}: detailed balance violated at (q, G) = ({q}, {g})"
                );
            }
        }
    }

    // (b) Verlet/proposal algebraic identity, 1e-12
    for i in 0..40 {
        let q = -1.0 + 2.0 * i as f64 / 39.0;
        let g = (i as f64 * 0.77).sin() * 2.0;
        let dt = 0.008;
        let out = propose(&ProposalKind::PositionVerletHmc, &quartic, q, g, dt).unwrap();
        let s = (2.0 * dt).sqrt();
        let direct = q - dt * quartic.dv(q + 0.5 * s * g) + s * g;
        assert!((out.q_proposed - direct).abs() <= 1e-12);
        let (qn, pn) = verlet_step(&quartic, q, g, (2.0 * dt).sqrt());
        let dh = quartic.v(qn) + 0.5 * pn * pn - quartic.v(q) - 0.5 * g * g;
        assert!((out.alpha - dh).abs() <= 1e-12);
    }

    // (c) free diffusion: Green-Kubo D = 1 exactly, Einstein D = 1 at 3 sigma
    let zero = Model1D::zero(1.0);
    for rule in [Mh, Barker] {
        let gk_cfg = GreenKuboConfig {
            burn_in: 100,
            ..GreenKuboConfig::with_defaults(ProposalKind::EulerMaruyama, rule, zero, 0.01, 100)
        };
        assert_eq!(green_kubo_diffusion(&gk_cfg, 81).unwrap().value, 1.0);
        let e_cfg = EinsteinConfig {
            burn_in: 10,
            subsample_stride: 1,
            ..EinsteinConfig::with_defaults(ProposalKind::EulerMaruyama, rule, zero, 0.02, 2000, 500)
        };
        let est = einstein_diffusion(&e_cfg, 82).unwrap();
        assert!(
            (est.value - 1.0).abs() <= 3.0 * est.std_error,
            "free diffusion {rule:?}: D = {} +- {}",
            est.value,
            est.std_error
        );
    }

    // (d) Gibbs invariant measure: KS test for every (proposal, rule) on
    // the cosine model at dt = 0.005, thinned to near-independence; the
    // threshold is the 1e-3-significance KS value for the sample size
    let n_samples = 100_000usize;
    let stride = 200u64;
    let threshold = 1.9495 / (n_samples as f64).sqrt();
    let table = GibbsSampler::periodic(&cosine, 8192);
    let kinds = [
        ProposalKind::EulerMaruyama,
        ProposalKind::ModifiedHighOrder,
        ProposalKind::ImplicitMidpoint,
        ProposalKind::PositionVerletHmc,
        ProposalKind::EulerMultiplicative(COSSQ),
    ];
    let combos: Vec<(ProposalKind, AcceptanceRule)> = kinds
        .iter()
        .flat_map(|&k| [(k, Mh), (k, Barker)])
        .collect();
    use rayon::prelude::*;
    let distances: Vec<(String, f64)> = combos
        .par_iter()
        .enumerate()
        .map(|(idx, (kind, rule))| {
            let mut rng = RngStream::new(850 + idx as u64, 0);
            let mut state = ChainState::new(Space::Torus, 0.0);
            for _ in 0..10_000 {
                let g = rng.normal();
                let u = rng.uniform();
                state.step(kind, *rule, &cosine, 0.005, g, u).unwrap();
            }
            let mut samples = Vec::with_capacity(n_samples);
            for _ in 0..n_samples {
                for _ in 0..stride {
                    let g = rng.normal();
                    let u = rng.uniform();
                    state.step(kind, *rule, &cosine, 0.005, g, u).unwrap();
                }
                samples.push(state.q);
            }
            let d = ks_distance(&mut samples, |x| table.cdf(x));
            (format!("{kind:?}+{rule:?}"), d)
        })
        .collect();
    for (label, d) in &distances {
        assert!(
            d <= &threshold,
            "KS test failed for {label}: D = {d:.5} > {threshold:.5}"
        );
    }

    // (e) Q-additivity over 1e4 steps, 1e-12
    let mut rng = RngStream::new(86, 0);
    let (state, traj) = run_trajectory(
        ChainState::new(Space::Torus, 0.0),
        &ProposalKind::PositionVerletHmc,
        Barker,
        &cosine,
        0.01,
        10_000,
        &mut rng,
        RecordPolicy::IncrementsOnly,
    )
    .unwrap();
    let total: f64 = traj.increments.unwrap().iter().sum();
    assert!((state.displacement - total).abs() <= 1e-12);

    // (f) determinism across worker counts (library side; the CLI test
    // checks byte-identical CSV artifacts)
    let cfg = StrongErrorConfig {
        model: quartic,
        kind: ProposalKind::EulerMaruyama,
        rule: Mh,
        dt_ref: 1e-4,
        k_values: vec![2, 8],
        horizon: 0.048,
        realizations: 128,
    };
    let run_in_pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| strong_error_study(&cfg, 87).unwrap())
    };
    let (a, b) = (run_in_pool(1), run_in_pool(4));
    for (x, y) in a.estimates.iter().zip(&b.estimates) {
        assert_eq!(x.to_bits(), y.to_bits(), "worker count changed the result");
    }

    let elapsed = started.elapsed();
    let worst_ks = distances.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    println!(
        "criterion 8 PASS: detailed balance, Verlet identity, free diffusion, KS (max D = {worst_ks:.5} < {threshold:.5}), Q-additivity, worker determinism in {elapsed:?}"
    );
}

#[test]
fn criterion_9_variance_ratio() {
    let started = Instant::now();
    let model = Model1D::cosine(1.0);
    let observable = move |q: f64| model.dv(q);
    let ratio = asymptotic_variance_ratio(
        &ProposalKind::PositionVerletHmc,
        &model,
        0.005,
        &observable,
        6_000,
        20_000,
        2_000,
        42,
    )
    .unwrap();
    let elapsed = started.elapsed();
    assert_in_band(ratio, 2.0, 0.3, "Barker/Metropolis variance ratio");
    println!("criterion 9 PASS: asymptotic variance ratio = {ratio:.3} in {elapsed:?}");
}
