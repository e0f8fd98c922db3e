//! JSON experiment configuration. Every field has a default, so `{}` is a
//! complete config; unknown keys are rejected with their full path.

use std::fs;
use std::path::Path;

use lvrae_core::flow::FlowTrainConfig;
use lvrae_core::lvrae::{GenConfig, LossWeights, SignalSpec, Stage1Config, Stage2Config};
use lvrae_core::manifold::ToySweepConfig;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    ToySweep,
    LvraeTrain,
    LvraeNoiseft,
    LvraeGen,
    GradCheck,
    Metrics,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ToySweep => "toy-sweep",
            Self::LvraeTrain => "lvrae-train",
            Self::LvraeNoiseft => "lvrae-noiseft",
            Self::LvraeGen => "lvrae-gen",
            Self::GradCheck => "grad-check",
            Self::Metrics => "metrics",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub experiment: ExperimentKind,
    pub out_dir: String,
    /// Worker threads for independent grid cells.
    pub threads: usize,
    /// Emit SVG scatter plots next to the CSVs.
    pub svg: bool,
    pub toy: ToySweepConfig,
    pub lvrae: LvraeConfig,
    pub grad_check: GradCheckConfig,
    pub metrics: MetricsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            experiment: ExperimentKind::default(),
            out_dir: "out".into(),
            threads: 1,
            svg: true,
            toy: ToySweepConfig::default(),
            lvrae: LvraeConfig::default(),
            grad_check: GradCheckConfig::default(),
            metrics: MetricsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LvraeConfig {
    pub signal: SignalSpec,
    pub latent_dim: usize,
    /// Per-entry standard deviation of the frozen semantic features.
    pub feature_std: f64,
    pub encoder_hidden: Vec<usize>,
    pub decoder_hidden: Vec<usize>,
    pub disc_hidden: Vec<usize>,
    pub weights: LossWeights,
    pub stage1: Stage1Config,
    pub stage2: Stage2Config,
    /// Noise level of the fixed-σ fine-tuning ablation.
    pub ablation_sigma: f64,
    pub eval_samples: usize,
    pub eval_noise_levels: Vec<f64>,
    pub amplification_delta: f64,
    pub amplification_trials: usize,
    pub cknna_k: usize,
    pub gen: GenConfig,
}

impl Default for LvraeConfig {
    fn default() -> Self {
        Self {
            signal: SignalSpec::default(),
            latent_dim: 32,
            feature_std: 0.1,
            encoder_hidden: vec![128, 128],
            decoder_hidden: vec![128, 128],
            disc_hidden: vec![128, 128],
            weights: LossWeights::default(),
            stage1: Stage1Config {
                eta_warmup_frac: 0.9,
                ..Stage1Config::default()
            },
            stage2: Stage2Config::default(),
            ablation_sigma: 0.1,
            eval_samples: 1000,
            eval_noise_levels: vec![0.0, 0.05, 0.1, 0.2],
            amplification_delta: 0.1,
            amplification_trials: 5,
            cknna_k: 10,
            gen: GenConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradCheckConfig {
    /// Random decoder configurations for the Jacobian check.
    pub jacobian_configs: usize,
    /// Randomly chosen parameter coordinates per gradient check.
    pub coords: usize,
    pub step: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            jacobian_configs: 50,
            coords: 100,
            step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// CSV of reference samples, one row per sample.
    pub reference: Option<String>,
    /// CSV of candidate samples compared against `reference`.
    pub candidate: Option<String>,
    pub cknna_k: usize,
    /// PSNR peak; `None` uses the largest magnitude in the reference set.
    pub peak: Option<f64>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            reference: None,
            candidate: None,
            cknna_k: 10,
            peak: None,
        }
    }
}

/// Parses a config from JSON text, naming the offending key on error.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, LabError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        LabError::Config {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_config(&text)
}

pub fn to_json(config: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

pub fn save_config(config: &ExperimentConfig, path: &Path) -> Result<(), LabError> {
    fs::write(path, to_json(config) + "\n").map_err(|e| LabError::io(path, e))
}

/// A reduced grid that finishes in seconds; used by smoke tests.
pub fn quick_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.toy.dims = vec![2, 8];
    c.toy.alphas = vec![0.0, 1.0];
    c.toy.hidden = vec![32, 32];
    c.toy.flow = FlowTrainConfig {
        steps: 50,
        batch_size: 32,
        ..FlowTrainConfig::default()
    };
    c.toy.sample_steps = 10;
    c.toy.n_samples = 64;
    c.lvrae.encoder_hidden = vec![32];
    c.lvrae.decoder_hidden = vec![32];
    c.lvrae.disc_hidden = vec![32];
    c.lvrae.stage1.steps = 50;
    c.lvrae.stage1.batch_size = 16;
    c.lvrae.stage2.steps = 30;
    c.lvrae.stage2.batch_size = 16;
    c.lvrae.eval_samples = 64;
    c.lvrae.gen.flow.steps = 30;
    c.lvrae.gen.flow.batch_size = 16;
    c.lvrae.gen.hidden = vec![32];
    c.lvrae.gen.sample_steps = 5;
    c.lvrae.gen.n_samples = 64;
    c.grad_check.jacobian_configs = 5;
    c.grad_check.coords = 20;
    c
}
