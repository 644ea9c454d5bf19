// temporary calibration probe; removed before release
use langevin_core::accept::AcceptanceRule::{Barker, MetropolisHastings as Mh};
use langevin_core::estimators::*;
use langevin_core::model::{DiffusionCoeff1D, Model1D};
use langevin_core::proposal::ProposalKind::{self, *};
use langevin_core::reference::*;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    let model = Model1D::cosine(1.0);
    let dts = [0.02, 0.01, 0.005, 0.0025];
    match which.as_str() {
        "rej-add" => {
            let t0 = std::time::Instant::now();
            let r = rejection_scaling_study(&PositionVerletHmc, Mh, &model, &dts, 10_000_000, 1).unwrap();
            let m = r.metropolis.unwrap();
            println!("HMC+MH:    est {:?} se {:?} slope {:.3}", m.estimates, m.std_errors, m.fit_slope);
            let r = rejection_scaling_study(&PositionVerletHmc, Barker, &model, &dts, 10_000_000, 2).unwrap();
            let bm = r.barker_mean.unwrap();
            let ba = r.barker_abs.unwrap();
            println!("HMC+B mean: est {:?} se {:?} slope {:.3}", bm.estimates, bm.std_errors, bm.fit_slope);
            println!("HMC+B abs:  est {:?} se {:?} slope {:.3}", ba.estimates, ba.std_errors, ba.fit_slope);
            let quartic = Model1D::quartic(1.0);
            let r = rejection_scaling_study(&ModifiedHighOrder, Mh, &quartic, &dts, 10_000_000, 3).unwrap();
            let m = r.metropolis.unwrap();
            println!("MOD+MH:    est {:?} se {:?} slope {:.3}", m.estimates, m.std_errors, m.fit_slope);
            println!("elapsed {:?}", t0.elapsed());
        }
        "rej-mult" => {
            let t0 = std::time::Instant::now();
            let kind = ProposalKind::EulerMultiplicative(DiffusionCoeff1D::CosineSquared);
            let r = rejection_scaling_study(&kind, Mh, &model, &dts, 10_000_000, 4).unwrap();
            let m = r.metropolis.unwrap();
            println!("MULT+MH:    est {:?} slope {:.3}", m.estimates, m.fit_slope);
            let r = rejection_scaling_study(&kind, Barker, &model, &dts, 10_000_000, 5).unwrap();
            let bm = r.barker_mean.unwrap();
            let ba = r.barker_abs.unwrap();
            println!("MULT+B mean: est {:?} se {:?} slope {:.3}", bm.estimates, bm.std_errors, bm.fit_slope);
            println!("MULT+B abs:  est {:?} slope {:.3}", ba.estimates, ba.fit_slope);
            println!("elapsed {:?}", t0.elapsed());
        }
        "gk" => {
            let t0 = std::time::Instant::now();
            // measure sd of per-realization GK sum at dt=0.01 to size K
            for (kind, rule, name) in [
                (EulerMaruyama, Mh, "MALA+MH"),
                (PositionVerletHmc, Mh, "HMC+MH"),
                (PositionVerletHmc, Barker, "HMC+B"),
            ] {
                let cfg = GreenKuboConfig::with_defaults(kind, rule, model, 0.01, 100_000);
                let est = green_kubo_diffusion(&cfg, 42).unwrap();
                println!(
                    "{name}: D = {:.5} +- {:.5} (sd_of_sum ~ {:.2})",
                    est.value,
                    est.std_error,
                    est.std_error / (0.01) * (100_000f64).sqrt()
                );
            }
            println!("ref D = 0.62386, elapsed {:?}", t0.elapsed());
        }
        "weak" => {
            let t0 = std::time::Instant::now();
            for (kind, rule, name) in [
                (ImplicitMidpoint, Barker, "mid+B"),
                (PositionVerletHmc, Barker, "hmc+B"),
                (ImplicitMidpoint, Mh, "mid+MH"),
                (PositionVerletHmc, Mh, "hmc+MH"),
            ] {
                for gh in [128usize, 256] {
                    let rs: Vec<f64> = dts
                        .iter()
                        .map(|&dt| {
                            weak_expansion_residual(&kind, rule, &model, GeneratorObservable::Sin(1), dt, gh).unwrap()
                        })
                        .collect();
                    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
                    let ly: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
                    let fit = langevin_core::stats::linear_fit(&lx, &ly);
                    println!("{name} gh={gh}: residuals {rs:?} slope {:.4}", fit.slope);
                }
            }
            println!("elapsed {:?}", t0.elapsed());
        }
        "einstein" => {
            let t0 = std::time::Instant::now();
            let cfg = EinsteinConfig::with_defaults(ImplicitMidpoint, Barker, model, 0.01, 20_000, 2000);
            let est = einstein_diffusion(&cfg, 7).unwrap();
            println!("mid+B Einstein: D = {:.5} +- {:.5}", est.value, est.std_error);
            println!("elapsed {:?}", t0.elapsed());
        }
        "strong" => {
            let t0 = std::time::Instant::now();
            for (kind, name) in [(EulerMaruyama, "MALA"), (ModifiedHighOrder, "MOD")] {
                let cfg = StrongErrorConfig {
                    model: Model1D::quartic(1.0),
                    kind,
                    rule: Mh,
                    dt_ref: 1e-5,
                    k_values: vec![50, 100, 200, 400, 800, 1600, 3200],
                    horizon: 0.096,
                    realizations: 10_000,
                };
                let r = strong_error_study(&cfg, 11).unwrap();
                println!("{name}: Ehat {:?}", r.estimates);
                println!("{name}: se   {:?}", r.std_errors);
                println!("{name}: slope {:.4}", r.fit_slope);
            }
            println!("elapsed {:?}", t0.elapsed());
        }
        "var" => {
            let t0 = std::time::Instant::now();
            let f = |q: f64| model.dv(q);
            let ratio = asymptotic_variance_ratio(&PositionVerletHmc, &model, 0.005, &f, 2000, 20_000, 2000, 3).unwrap();
            println!("variance ratio = {ratio:.3}, elapsed {:?}", t0.elapsed());
        }
        "weak-small" => weak_small(),
        "mult-fine" | "gk-big" | "strong-seeds" => probes2(&which),
        "gk-series" | "gk-mult-series" | "weak-fine" | "gh-conv" => probes3(&which),
        "midb-truth" | "mult-finer" => probes4(&which),
        _ => eprintln!("usage: calib [rej-add|rej-mult|gk|weak|einstein|strong|var|weak-small]"),
    }
}
// appended probes
#[allow(dead_code)]
fn weak_small() {
    use langevin_core::stats::linear_fit;
    let model = Model1D::cosine(1.0);
    let dts = [0.004, 0.002, 0.001, 0.0005, 0.00025];
    for (kind, rule, name) in [
        (ImplicitMidpoint, Barker, "mid+B"),
        (PositionVerletHmc, Barker, "hmc+B"),
    ] {
        let rs: Vec<f64> = dts
            .iter()
            .map(|&dt| weak_expansion_residual(&kind, rule, &model, GeneratorObservable::Sin(1), dt, 256).unwrap())
            .collect();
        let lx: Vec<f64> = dts.iter().map(|d: &f64| d.ln()).collect();
        let ly: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        println!("{name} small-dt: residuals {rs:?} slope {:.4}", linear_fit(&lx, &ly).slope);
        // pairwise slopes
        for w in rs.windows(2).zip(dts.windows(2)) {
            let (r, d) = w;
            println!("   pair slope {:.4}", (r[0] / r[1]).ln() / (d[0] / d[1]).ln());
        }
    }
}

#[allow(dead_code)]
fn probes2(which: &str) {
    let model = Model1D::cosine(1.0);
    match which {
        "mult-fine" => {
            let kind = ProposalKind::EulerMultiplicative(DiffusionCoeff1D::CosineSquared);
            let dts = [0.005, 0.0025, 0.00125, 0.000625];
            let r = rejection_scaling_study(&kind, Barker, &model, &dts, 10_000_000, 5).unwrap();
            let bm = r.barker_mean.unwrap();
            println!("MULT+B mean fine: est {:?} se {:?} slope {:.3}", bm.estimates, bm.std_errors, bm.fit_slope);
            let m = r.barker_abs.unwrap();
            println!("MULT+B abs fine: slope {:.3}", m.fit_slope);
        }
        "gk-big" => {
            for (kind, rule, name, k) in [
                (PositionVerletHmc, Barker, "HMC+B", 1_000_000u64),
                (PositionVerletHmc, Mh, "HMC+MH", 1_000_000),
                (EulerMaruyama, Mh, "MALA+MH", 1_000_000),
            ] {
                let t0 = std::time::Instant::now();
                let cfg = GreenKuboConfig::with_defaults(kind, rule, model, 0.01, k);
                let est = green_kubo_diffusion(&cfg, 1042).unwrap();
                println!("{name} K={k}: D = {:.6} +- {:.6} bias {:+.6} ({:?})", est.value, est.std_error, est.value - 0.62386, t0.elapsed());
            }
        }
        "strong-seeds" => {
            for seed in [42u64, 1, 2] {
                let cfg = StrongErrorConfig {
                    model: Model1D::quartic(1.0),
                    kind: ModifiedHighOrder,
                    rule: Mh,
                    dt_ref: 1e-5,
                    k_values: vec![50, 100, 200, 400, 800, 1600, 3200],
                    horizon: 0.096,
                    realizations: 10_000,
                };
                let r = strong_error_study(&cfg, seed).unwrap();
                println!("MOD seed {seed}: slope {:.4} est {:?}", r.fit_slope, r.estimates);
            }
        }
        _ => {}
    }
}

#[allow(dead_code)]
fn probes3(which: &str) {
    let model = Model1D::cosine(1.0);
    match which {
        "gk-series" => {
            // bias resolvability for the criterion-6 grids
            for (kind, rule, name, ks) in [
                (ImplicitMidpoint, Barker, "mid+B", [500_000u64, 1_000_000, 4_000_000]),
                (PositionVerletHmc, Barker, "hmc+B", [250_000, 1_000_000, 4_000_000]),
                (PositionVerletHmc, Mh, "hmc+MH", [100_000, 200_000, 400_000]),
                (EulerMaruyama, Mh, "mala", [50_000, 100_000, 200_000]),
            ] {
                for (i, &dt) in [0.04, 0.02, 0.01].iter().enumerate() {
                    let t0 = std::time::Instant::now();
                    let cfg = GreenKuboConfig::with_defaults(kind, rule, model, dt, ks[i]);
                    let est = green_kubo_diffusion(&cfg, 42 + i as u64).unwrap();
                    println!(
                        "{name} dt={dt} K={}: bias {:+.6} +- {:.6} ratio {:.1} ({:?})",
                        ks[i], est.value - 0.62386, est.std_error,
                        (est.value - 0.62386).abs() / est.std_error, t0.elapsed()
                    );
                }
            }
        }
        "gk-mult-series" => {
            let kind = ProposalKind::EulerMultiplicative(DiffusionCoeff1D::CosineSquared);
            for (rule, name) in [(Barker, "mult+B"), (Mh, "mult+MH")] {
                for (i, &dt) in [0.04, 0.02, 0.01].iter().enumerate() {
                    let cfg = GreenKuboConfig::with_defaults(kind, rule, model, dt, 200_000);
                    let est = green_kubo_diffusion(&cfg, 62 + i as u64).unwrap();
                    println!(
                        "{name} dt={dt}: bias {:+.6} +- {:.6} ratio {:.1}",
                        est.value - 0.30478, est.std_error,
                        (est.value - 0.30478).abs() / est.std_error
                    );
                }
            }
        }
        "weak-fine" => {
            use langevin_core::stats::linear_fit;
            let dts = [0.00025, 0.000125, 0.0000625, 0.00003125];
            for (kind, rule, name) in [
                (ImplicitMidpoint, Barker, "mid+B"),
                (PositionVerletHmc, Barker, "hmc+B"),
                (ImplicitMidpoint, Mh, "mid+MH"),
                (PositionVerletHmc, Mh, "hmc+MH"),
            ] {
                let rs: Vec<f64> = dts.iter().map(|&dt| {
                    weak_expansion_residual(&kind, rule, &model, GeneratorObservable::Sin(1), dt, 256).unwrap()
                }).collect();
                let lx: Vec<f64> = dts.iter().map(|d: &f64| d.ln()).collect();
                let ly: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
                println!("{name}: slope {:.4} residuals {rs:?}", linear_fit(&lx, &ly).slope);
            }
        }
        "gh-conv" => {
            for gh in [128usize, 256, 512] {
                let r = weak_expansion_residual(&PositionVerletHmc, Barker, &model, GeneratorObservable::Sin(1), 0.0005, gh).unwrap();
                println!("hmc+B gh={gh}: {r:.15e}");
            }
        }
        _ => {}
    }
}

#[allow(dead_code)]
fn probes4(which: &str) {
    let model = Model1D::cosine(1.0);
    match which {
        "midb-truth" => {
            for (dt, k) in [(0.04, 1_000_000u64), (0.02, 4_000_000), (0.01, 30_000_000)] {
                let t0 = std::time::Instant::now();
                let cfg = GreenKuboConfig::with_defaults(ImplicitMidpoint, Barker, model, dt, k);
                let est = green_kubo_diffusion(&cfg, 777).unwrap();
                println!(
                    "mid+B dt={dt} K={k}: bias {:+.6} +- {:.6} ({:?})",
                    est.value - 0.62386, est.std_error, t0.elapsed()
                );
            }
        }
        "mult-finer" => {
            let kind = ProposalKind::EulerMultiplicative(DiffusionCoeff1D::CosineSquared);
            let dts = [0.001, 0.0005, 0.00025, 0.000125];
            let r = rejection_scaling_study(&kind, Barker, &model, &dts, 10_000_000, 15).unwrap();
            let bm = r.barker_mean.unwrap();
            println!("MULT+B mean finer: est {:?} se {:?} slope {:.3}", bm.estimates, bm.std_errors, bm.fit_slope);
        }
        _ => {}
    }
}
