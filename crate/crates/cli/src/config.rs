//! Experiment configuration: a flat JSON file merged with command-line
//! overrides, validated per study.

use langevin_core::accept::AcceptanceRule;
use langevin_core::model::{DiffusionCoeff1D, Model1D};
use langevin_core::proposal::ProposalKind;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    StrongError,
    RejectionScaling,
    GreenKubo,
    Einstein,
    WeakExpansion,
    Reference,
    VarianceRatio,
}

impl Study {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "strong-error" => Some(Study::StrongError),
            "rejection-scaling" => Some(Study::RejectionScaling),
            "green-kubo" => Some(Study::GreenKubo),
            "einstein" => Some(Study::Einstein),
            "weak-expansion" => Some(Study::WeakExpansion),
            "reference" => Some(Study::Reference),
            "variance-ratio" => Some(Study::VarianceRatio),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Study::StrongError => "strong-error",
            Study::RejectionScaling => "rejection-scaling",
            Study::GreenKubo => "green-kubo",
            Study::Einstein => "einstein",
            Study::WeakExpansion => "weak-expansion",
            Study::Reference => "reference",
            Study::VarianceRatio => "variance-ratio",
        }
    }
}

/// Raw configuration as read from JSON; every field optional so that
/// command-line flags can fill the gaps. Unknown fields are rejected.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub study: Option<String>,
    pub model: Option<String>,
    pub diffusion: Option<String>,
    pub proposal: Option<String>,
    pub rule: Option<String>,
    pub beta: Option<f64>,
    pub dt_list: Option<Vec<f64>>,
    pub realizations: Option<u64>,
    pub horizon: Option<f64>,
    pub tau: Option<f64>,
    pub n_steps: Option<u64>,
    pub dt_ref: Option<f64>,
    pub k_values: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub eta: Option<f64>,
    pub n_points: Option<usize>,
    pub gh_points: Option<usize>,
    pub dt_thermalization: Option<f64>,
    pub subsample_stride: Option<u64>,
    pub burn_in: Option<u64>,
}

impl RawConfig {
    /// File values are the base; any flag value wins.
    pub fn merge_over(self, base: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($field:ident) => {
                self.$field.or(base.$field)
            };
        }
        RawConfig {
            study: pick!(study),
            model: pick!(model),
            diffusion: pick!(diffusion),
            proposal: pick!(proposal),
            rule: pick!(rule),
            beta: pick!(beta),
            dt_list: pick!(dt_list),
            realizations: pick!(realizations),
            horizon: pick!(horizon),
            tau: pick!(tau),
            n_steps: pick!(n_steps),
            dt_ref: pick!(dt_ref),
            k_values: pick!(k_values),
            seed: pick!(seed),
            workers: pick!(workers),
            output_dir: pick!(output_dir),
            eta: pick!(eta),
            n_points: pick!(n_points),
            gh_points: pick!(gh_points),
            dt_thermalization: pick!(dt_thermalization),
            subsample_stride: pick!(subsample_stride),
            burn_in: pick!(burn_in),
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Fully resolved configuration: every study-independent default applied,
/// names parsed into enums.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub study: Study,
    pub model: Model1D,
    pub model_name: String,
    pub diffusion: DiffusionCoeff1D,
    pub diffusion_name: String,
    pub proposal: ProposalKind,
    pub proposal_name: String,
    pub rule: AcceptanceRule,
    pub rule_name: String,
    pub dt_list: Vec<f64>,
    pub realizations: u64,
    pub horizon: f64,
    pub tau: f64,
    pub n_steps: u64,
    pub dt_ref: f64,
    pub k_values: Vec<usize>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
    pub eta: f64,
    pub n_points: usize,
    pub gh_points: usize,
    pub dt_thermalization: f64,
    pub subsample_stride: Option<u64>,
    pub burn_in: u64,
}

fn require<T>(value: Option<T>, field: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| ConfigError(format!("missing required field `{field}`")))
}

impl ExperimentConfig {
    pub fn resolve(raw: RawConfig) -> Result<Self, ConfigError> {
        let study_name = require(raw.study.clone(), "study")?;
        let study = Study::from_name(&study_name)
            .ok_or_else(|| ConfigError(format!("unknown study `{study_name}`")))?;

        let beta = raw.beta.unwrap_or(1.0);
        if beta <= 0.0 {
            return Err(ConfigError("field `beta` must be positive".into()));
        }
        let model_name = raw.model.clone().unwrap_or_else(|| "cosine".into());
        let model = Model1D::from_name(&model_name, beta)
            .ok_or_else(|| ConfigError(format!("unknown model `{model_name}`")))?;
        let diffusion_name = raw.diffusion.clone().unwrap_or_else(|| "unit".into());
        let diffusion = DiffusionCoeff1D::from_name(&diffusion_name)
            .ok_or_else(|| ConfigError(format!("unknown diffusion `{diffusion_name}`")))?;
        let proposal_name = raw.proposal.clone().unwrap_or_else(|| "mala".into());
        let proposal = ProposalKind::from_name(&proposal_name, Some(diffusion))
            .ok_or_else(|| ConfigError(format!("unknown proposal `{proposal_name}`")))?;
        let rule_name = raw.rule.clone().unwrap_or_else(|| "metropolis".into());
        let rule = AcceptanceRule::from_name(&rule_name)
            .ok_or_else(|| ConfigError(format!("unknown rule `{rule_name}`")))?;

        let dt_list = raw.dt_list.clone().unwrap_or_default();
        let needs_dt_list = matches!(
            study,
            Study::RejectionScaling
                | Study::GreenKubo
                | Study::Einstein
                | Study::WeakExpansion
                | Study::VarianceRatio
        );
        if needs_dt_list {
            if dt_list.is_empty() {
                return Err(ConfigError(
                    "missing required field `dt_list` for this study".into(),
                ));
            }
            if dt_list.iter().any(|&dt| dt <= 0.0) {
                return Err(ConfigError("field `dt_list` must be positive".into()));
            }
            if dt_list.windows(2).any(|w| w[1] >= w[0]) {
                return Err(ConfigError(
                    "field `dt_list` must be strictly decreasing".into(),
                ));
            }
        }

        match study {
            Study::StrongError => {
                require(raw.dt_ref, "dt_ref")?;
                require(raw.k_values.clone(), "k_values")?;
                require(raw.horizon, "horizon")?;
                require(raw.realizations, "realizations")?;
            }
            Study::RejectionScaling => {
                require(raw.n_steps, "n_steps")?;
            }
            Study::GreenKubo => {
                require(raw.realizations, "realizations")?;
            }
            Study::Einstein | Study::VarianceRatio => {
                require(raw.n_steps, "n_steps")?;
                require(raw.realizations, "realizations")?;
            }
            Study::WeakExpansion | Study::Reference => {}
        }

        Ok(ExperimentConfig {
            study,
            model,
            model_name,
            diffusion,
            diffusion_name,
            proposal,
            proposal_name,
            rule,
            rule_name,
            dt_list,
            realizations: raw.realizations.unwrap_or(0),
            horizon: raw.horizon.unwrap_or(0.0),
            tau: raw.tau.unwrap_or_else(|| {
                if proposal.is_multiplicative() {
                    2.0
                } else {
                    0.6
                }
            }),
            n_steps: raw.n_steps.unwrap_or(0),
            dt_ref: raw.dt_ref.unwrap_or(0.0),
            k_values: raw.k_values.unwrap_or_default(),
            seed: raw.seed.unwrap_or(0),
            workers: raw.workers,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(".")),
            eta: raw.eta.unwrap_or(1e-3),
            n_points: raw.n_points.unwrap_or(4096),
            gh_points: raw.gh_points.unwrap_or(256),
            dt_thermalization: raw.dt_thermalization.unwrap_or(0.005),
            subsample_stride: raw.subsample_stride,
            burn_in: raw.burn_in.unwrap_or(10_000),
        })
    }
}
