//! `langevin`: experiment driver for Metropolized overdamped Langevin
//! discretizations. Subcommands: `run` (execute a study and write
//! CSV/JSON artifacts), `reference` (print the analytic diffusion
//! constant), `validate-config` (check a config file without running).
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure.

mod config;
mod run;

use clap::{Args, Parser, Subcommand};
use config::{ExperimentConfig, RawConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "langevin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study described by a config file and/or flags.
    Run(StudyArgs),
    /// Print the analytic reference diffusion constant as JSON.
    Reference(ReferenceArgs),
    /// Validate a configuration without running it.
    ValidateConfig {
        /// Path to a JSON configuration file.
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Default)]
struct StudyArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Study name: strong-error, rejection-scaling, green-kubo, einstein,
    /// weak-expansion, reference, variance-ratio.
    #[arg(long)]
    study: Option<String>,
    /// Model name: quartic, cosine, zero, harmonic.
    #[arg(long)]
    model: Option<String>,
    /// Diffusion coefficient: unit, cosine-squared.
    #[arg(long)]
    diffusion: Option<String>,
    /// Proposal: mala, modified, midpoint, hmc, mala-mult.
    #[arg(long)]
    proposal: Option<String>,
    /// Acceptance rule: metropolis, barker.
    #[arg(long)]
    rule: Option<String>,
    /// Inverse temperature (default 1).
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated, strictly decreasing timesteps.
    #[arg(long, value_delimiter = ',')]
    dt_list: Option<Vec<f64>>,
    /// Independent realizations.
    #[arg(long)]
    realizations: Option<u64>,
    /// Trajectory horizon T of the strong-error study.
    #[arg(long)]
    horizon: Option<f64>,
    /// Green-Kubo truncation time.
    #[arg(long)]
    tau: Option<f64>,
    /// Steps per chain (rejection-scaling, einstein, variance-ratio).
    #[arg(long)]
    n_steps: Option<u64>,
    /// Reference timestep of the strong-error study.
    #[arg(long)]
    dt_ref: Option<f64>,
    /// Comma-separated coarsening factors of the strong-error study.
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// RNG seed; every artifact records it.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: LANGEVIN_WORKERS or all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Linear-response perturbation strength.
    #[arg(long)]
    eta: Option<f64>,
    /// Quadrature points (power of two).
    #[arg(long)]
    n_points: Option<usize>,
    /// Gauss-Hermite points of the weak-expansion study.
    #[arg(long)]
    gh_points: Option<usize>,
    /// Thermalization timestep for equilibrated initial conditions.
    #[arg(long)]
    dt_thermalization: Option<f64>,
    /// Thermalization subsampling stride.
    #[arg(long)]
    subsample_stride: Option<u64>,
    /// Burn-in steps discarded before statistics.
    #[arg(long)]
    burn_in: Option<u64>,
}

impl StudyArgs {
    fn into_raw(self) -> RawConfig {
        RawConfig {
            study: self.study,
            model: self.model,
            diffusion: self.diffusion,
            proposal: self.proposal,
            rule: self.rule,
            beta: self.beta,
            dt_list: self.dt_list,
            realizations: self.realizations,
            horizon: self.horizon,
            tau: self.tau,
            n_steps: self.n_steps,
            dt_ref: self.dt_ref,
            k_values: self.k_values,
            seed: self.seed,
            workers: self.workers,
            output_dir: self.output_dir,
            eta: self.eta,
            n_points: self.n_points,
            gh_points: self.gh_points,
            dt_thermalization: self.dt_thermalization,
            subsample_stride: self.subsample_stride,
            burn_in: self.burn_in,
        }
    }
}

#[derive(Args)]
struct ReferenceArgs {
    /// Model name (a periodic model: cosine or zero).
    #[arg(long, default_value = "cosine")]
    model: String,
    /// Diffusion coefficient: unit, cosine-squared.
    #[arg(long, default_value = "unit")]
    diffusion: String,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Linear-response perturbation strength.
    #[arg(long, default_value_t = 1e-3)]
    eta: f64,
    /// Quadrature points (power of two).
    #[arg(long, default_value_t = 4096)]
    n_points: usize,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn load_file_config(path: &PathBuf) -> Result<RawConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config file {}: {e}", path.display()))
}

fn resolve(args: StudyArgs) -> Result<ExperimentConfig, String> {
    let file_cfg = match &args.config {
        Some(path) => load_file_config(path)?,
        None => RawConfig::default(),
    };
    let merged = args.into_raw().merge_over(file_cfg);
    ExperimentConfig::resolve(merged).map_err(|e| e.to_string())
}

fn init_workers(workers: Option<usize>) {
    let from_env = std::env::var("LANGEVIN_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = workers.or(from_env).filter(|&n| n > 0) {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let cfg = match resolve(args) {
                Ok(cfg) => cfg,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            init_workers(cfg.workers);
            match run::run(&cfg) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(run::RunError::Config(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(EXIT_CONFIG)
                }
                Err(run::RunError::Numeric(msg)) => {
                    eprintln!("numeric failure: {msg}");
                    ExitCode::from(EXIT_NUMERIC)
                }
                Err(run::RunError::Io(msg)) => {
                    eprintln!("io error: {msg}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Reference(args) => {
            let raw = RawConfig {
                study: Some("reference".into()),
                model: Some(args.model),
                diffusion: Some(args.diffusion),
                beta: Some(args.beta),
                eta: Some(args.eta),
                n_points: Some(args.n_points),
                ..RawConfig::default()
            };
            let cfg = match ExperimentConfig::resolve(raw) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            match run::reference_report(&cfg) {
                Ok(report) => {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    ExitCode::SUCCESS
                }
                Err(msg) => {
                    eprintln!("numeric failure: {msg}");
                    ExitCode::from(EXIT_NUMERIC)
                }
            }
        }
        Command::ValidateConfig { config } => {
            let raw = match load_file_config(&config) {
                Ok(raw) => raw,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            match ExperimentConfig::resolve(raw) {
                Ok(cfg) => {
                    println!(
                        "ok: study `{}` on model `{}` (seed {})",
                        cfg.study.name(),
                        cfg.model_name,
                        cfg.seed
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
    }
}
