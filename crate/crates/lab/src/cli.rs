//! `lvrae <subcommand> [--config PATH] [--seed N] [--out DIR] [--threads N]`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, ExperimentConfig, ExperimentKind};
use crate::{experiments, LabError};

#[derive(Debug, Parser)]
#[command(name = "lvrae", version, about = "Residual-latent autoencoder and off-manifold sensitivity experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config; missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for independent grid cells.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Flow model on toy latents decoded through the off-manifold decoder, over (D, alpha).
    ToySweep,
    /// Stage-1 training of the residual autoencoder.
    LvraeTrain,
    /// Stage-2 noise-augmented decoder fine-tuning and the robustness ablation.
    LvraeNoiseft,
    /// Flow model on latents and the inference-noise sweep.
    LvraeGen,
    /// Finite-difference checks of every analytic derivative.
    GradCheck,
    /// Distance, reconstruction and alignment metrics between two CSV dumps.
    Metrics {
        #[arg(long, value_name = "CSV")]
        reference: Option<PathBuf>,
        #[arg(long, value_name = "CSV")]
        candidate: Option<PathBuf>,
    },
}

impl Command {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Command::ToySweep => ExperimentKind::ToySweep,
            Command::LvraeTrain => ExperimentKind::LvraeTrain,
            Command::LvraeNoiseft => ExperimentKind::LvraeNoiseft,
            Command::LvraeGen => ExperimentKind::LvraeGen,
            Command::GradCheck => ExperimentKind::GradCheck,
            Command::Metrics { .. } => ExperimentKind::Metrics,
        }
    }
}

/// Effective config: file (or defaults), then command-line overrides.
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let mut config = match &cli.common.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    config.experiment = cli.command.kind();
    if let Some(s) = cli.common.seed {
        config.seed = s;
    }
    if let Some(o) = &cli.common.out {
        config.out_dir = o.display().to_string();
    }
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return Err(LabError::Usage("--threads must be at least 1".into()));
        }
        config.threads = t;
    }
    if let Command::Metrics { reference, candidate } = &cli.command {
        if let Some(r) = reference {
            config.metrics.reference = Some(r.display().to_string());
        }
        if let Some(c) = candidate {
            config.metrics.candidate = Some(c.display().to_string());
        }
    }
    Ok(config)
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match resolve(&cli).and_then(|c| experiments::run(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
