//! Study execution and artifact writing.
//!
//! Every study writes `<study>.csv` (per-timestep rows, RFC-4180, 17
//! significant digits) and `<study>.summary.json` (fit results, the
//! resolved configuration including the seed, and wall time). Files are
//! written atomically: a temporary file in the target directory is
//! renamed into place.

use crate::config::{ExperimentConfig, Study};
use langevin_core::estimators::{
    asymptotic_variance_ratio, bias_order_fit, einstein_diffusion, green_kubo_diffusion,
    rejection_scaling_study, strong_error_study, DiffusionEstimate, EinsteinConfig, EstimatorError,
    GreenKuboConfig, StrongErrorConfig, StudyResult,
};
use langevin_core::model::DiffusionCoeff1D;
use langevin_core::reference::{
    analytic_diffusion_1d, lifson_jackson_oracle, weak_expansion_residual, GeneratorObservable,
    QuadRule, QuadratureGrid,
};
use langevin_core::stats::log_log_fit;
use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub enum RunError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl From<EstimatorError> for RunError {
    fn from(e: EstimatorError) -> Self {
        match e {
            EstimatorError::Config(msg) => RunError::Config(msg),
            other => RunError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

/// Write bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().unwrap_or_default().to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn csv_bytes(rows: &[(f64, f64, f64)]) -> Vec<u8> {
    let mut out = String::from("dt,estimate,std_error\r\n");
    for (dt, est, se) in rows {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\r\n", dt, est, se));
    }
    out.into_bytes()
}

fn study_rows(result: &StudyResult) -> Vec<(f64, f64, f64)> {
    result
        .dt_values
        .iter()
        .zip(&result.estimates)
        .zip(&result.std_errors)
        .map(|((&dt, &est), &se)| (dt, est, se))
        .collect()
}

fn estimate_rows(estimates: &[DiffusionEstimate]) -> Vec<(f64, f64, f64)> {
    estimates
        .iter()
        .map(|e| (e.dt, e.value, e.std_error))
        .collect()
}

struct Artifacts {
    csv: Vec<(PathBuf, Vec<u8>)>,
    results: Value,
}

/// Execute the configured study and write its artifacts. Returns the paths
/// written.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let started = Instant::now();
    let dir = cfg.output_dir.clone();
    let name = cfg.study.name();
    let art = dispatch(cfg)?;

    let mut written = Vec::new();
    for (path, bytes) in &art.csv {
        write_atomic(path, bytes)?;
        written.push(path.clone());
    }
    let summary_path = dir.join(format!("{name}.summary.json"));
    let summary = json!({
        "study": name,
        "config": serde_json::to_value(cfg).unwrap(),
        "results": art.results,
        "artifacts": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    write_atomic(&summary_path, serde_json::to_string_pretty(&summary).unwrap().as_bytes())?;
    written.push(summary_path);
    Ok(written)
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let dir = &cfg.output_dir;
    let name = cfg.study.name();
    match cfg.study {
        Study::StrongError => {
            let study_cfg = StrongErrorConfig {
                model: cfg.model,
                kind: cfg.proposal,
                rule: cfg.rule,
                dt_ref: cfg.dt_ref,
                k_values: cfg.k_values.clone(),
                horizon: cfg.horizon,
                realizations: cfg.realizations,
            };
            let result = strong_error_study(&study_cfg, cfg.seed)?;
            Ok(Artifacts {
                csv: vec![(dir.join(format!("{name}.csv")), csv_bytes(&study_rows(&result)))],
                results: json!({
                    "fit_slope": result.fit_slope,
                    "fit_intercept": result.fit_intercept,
                }),
            })
        }
        Study::RejectionScaling => {
            let result = rejection_scaling_study(
                &cfg.proposal,
                cfg.rule,
                &cfg.model,
                &cfg.dt_list,
                cfg.n_steps,
                cfg.seed,
            )?;
            let mut csv = Vec::new();
            let mut results = serde_json::Map::new();
            if let Some(series) = &result.metropolis {
                csv.push((dir.join(format!("{name}.csv")), csv_bytes(&study_rows(series))));
                results.insert("metropolis_slope".into(), json!(series.fit_slope));
            }
            if let Some(series) = &result.barker_mean {
                csv.push((dir.join(format!("{name}.csv")), csv_bytes(&study_rows(series))));
                results.insert("barker_mean_slope".into(), json!(series.fit_slope));
            }
            if let Some(series) = &result.barker_abs {
                csv.push((
                    dir.join(format!("{name}.abs.csv")),
                    csv_bytes(&study_rows(series)),
                ));
                results.insert("barker_abs_slope".into(), json!(series.fit_slope));
            }
            Ok(Artifacts {
                csv,
                results: Value::Object(results),
            })
        }
        Study::GreenKubo => {
            let mut estimates = Vec::new();
            for (i, &dt) in cfg.dt_list.iter().enumerate() {
                let mut gk = GreenKuboConfig::with_defaults(
                    cfg.proposal,
                    cfg.rule,
                    cfg.model,
                    dt,
                    cfg.realizations,
                );
                gk.tau = cfg.tau;
                gk.dt_thermalization = cfg.dt_thermalization;
                gk.burn_in = cfg.burn_in;
                if let Some(stride) = cfg.subsample_stride {
                    gk.subsample_stride = stride;
                }
                estimates.push(green_kubo_diffusion(&gk, cfg.seed.wrapping_add(i as u64))?);
            }
            diffusion_artifacts(cfg, estimates)
        }
        Study::Einstein => {
            let mut estimates = Vec::new();
            for (i, &dt) in cfg.dt_list.iter().enumerate() {
                let mut ec = EinsteinConfig::with_defaults(
                    cfg.proposal,
                    cfg.rule,
                    cfg.model,
                    dt,
                    cfg.n_steps,
                    cfg.realizations,
                );
                ec.dt_thermalization = cfg.dt_thermalization;
                ec.burn_in = cfg.burn_in;
                if let Some(stride) = cfg.subsample_stride {
                    ec.subsample_stride = stride;
                }
                estimates.push(einstein_diffusion(&ec, cfg.seed.wrapping_add(i as u64))?);
            }
            diffusion_artifacts(cfg, estimates)
        }
        Study::WeakExpansion => {
            let mut rows = Vec::new();
            for &dt in &cfg.dt_list {
                let r = weak_expansion_residual(
                    &cfg.proposal,
                    cfg.rule,
                    &cfg.model,
                    GeneratorObservable::Sin(1),
                    dt,
                    cfg.gh_points,
                )
                .map_err(|e| RunError::Numeric(e.to_string()))?;
                rows.push((dt, r, 0.0));
            }
            let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let fit = log_log_fit(&xs, &ys);
            Ok(Artifacts {
                csv: vec![(dir.join(format!("{name}.csv")), csv_bytes(&rows))],
                results: json!({"fit_slope": fit.slope, "fit_intercept": fit.intercept}),
            })
        }
        Study::Reference => {
            let report = reference_report(cfg).map_err(|e| RunError::Numeric(e))?;
            let d = report["D_linear_response"].as_f64().unwrap();
            Ok(Artifacts {
                csv: vec![(dir.join(format!("{name}.csv")), csv_bytes(&[(0.0, d, 0.0)]))],
                results: report,
            })
        }
        Study::VarianceRatio => {
            let model = cfg.model;
            let observable = move |q: f64| model.dv(q);
            let mut rows = Vec::new();
            for (i, &dt) in cfg.dt_list.iter().enumerate() {
                let ratio = asymptotic_variance_ratio(
                    &cfg.proposal,
                    &cfg.model,
                    dt,
                    &observable,
                    cfg.realizations,
                    cfg.n_steps,
                    cfg.burn_in,
                    cfg.seed.wrapping_add(i as u64),
                )?;
                rows.push((dt, ratio, 0.0));
            }
            Ok(Artifacts {
                csv: vec![(dir.join(format!("{name}.csv")), csv_bytes(&rows))],
                results: json!({"ratios": rows.iter().map(|r| r.1).collect::<Vec<_>>()}),
            })
        }
    }
}

fn diffusion_artifacts(
    cfg: &ExperimentConfig,
    estimates: Vec<DiffusionEstimate>,
) -> Result<Artifacts, RunError> {
    let dir = &cfg.output_dir;
    let name = cfg.study.name();
    // reference value for the bias fit, when the model admits one
    let d_ref = if cfg.model.space == langevin_core::model::Space::Torus {
        let m = match cfg.proposal {
            langevin_core::proposal::ProposalKind::EulerMultiplicative(m) => m,
            _ => DiffusionCoeff1D::Unit,
        };
        analytic_diffusion_1d(
            &cfg.model,
            &m,
            QuadratureGrid::new(cfg.n_points, QuadRule::Simpson),
            cfg.eta,
        )
        .ok()
    } else {
        None
    };
    let bias = d_ref.and_then(|d| bias_order_fit(&estimates, d).ok());
    Ok(Artifacts {
        csv: vec![(
            dir.join(format!("{name}.csv")),
            csv_bytes(&estimate_rows(&estimates)),
        )],
        results: json!({
            "d_reference": d_ref,
            "bias_fit_slope": bias.as_ref().map(|f| f.slope),
            "bias_fit_intercept": bias.as_ref().map(|f| f.intercept),
            "estimates": estimates,
        }),
    })
}

/// The JSON object printed by the `reference` subcommand.
pub fn reference_report(cfg: &ExperimentConfig) -> Result<Value, String> {
    let grid = QuadratureGrid::new(cfg.n_points, QuadRule::Simpson);
    let d = analytic_diffusion_1d(&cfg.model, &cfg.diffusion, grid, cfg.eta)
        .map_err(|e| e.to_string())?;
    let lj = if cfg.diffusion == DiffusionCoeff1D::Unit {
        Some(lifson_jackson_oracle(&cfg.model, grid).map_err(|e| e.to_string())?)
    } else {
        None
    };
    Ok(json!({
        "model": cfg.model_name,
        "M": cfg.diffusion_name,
        "beta": cfg.model.beta,
        "D_linear_response": d,
        "D_lifson_jackson": lj,
        "eta": cfg.eta,
        "n_points": cfg.n_points,
    }))
}
