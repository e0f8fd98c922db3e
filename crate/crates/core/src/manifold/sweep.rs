use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{ToyDecoder, ToyDistribution};
use crate::flow::{euler_sample, train_flow, FlowTrainConfig, ShiftSchedule, VelocityModel};
use crate::metrics::energy_distance;
use crate::numerics::{Mat, RngState};
use crate::Result;

/// Everything that determines a `(D, α)` sweep besides the seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ToySweepConfig {
    pub dims: Vec<usize>,
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub distribution: ToyDistribution,
    /// Hidden widths of the velocity MLP.
    pub hidden: Vec<usize>,
    pub flow: FlowTrainConfig,
    pub sample_steps: usize,
    /// Generated samples per cell; the ground-truth set has the same size.
    pub n_samples: usize,
}

impl Default for ToySweepConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 16, 64, 128],
            alphas: vec![0.0, 0.5, 1.0, 2.0],
            beta: 1.0,
            distribution: ToyDistribution::default(),
            hidden: vec![128; 3],
            flow: FlowTrainConfig {
                steps: 2000,
                ..FlowTrainConfig::default()
            },
            sample_steps: 100,
            n_samples: 1000,
        }
    }
}

/// One `(D, α)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyCell {
    pub alpha: f64,
    pub energy_distance: f64,
    /// Decoded generations, `n_samples x 2`.
    pub decoded: Mat,
}

/// All cells sharing one latent dimension.
///
/// The flow model, frame `(P, U)` and read-out `W` are drawn once per `D`;
/// cells differ only in the decoder gain `α`, so every `α` decodes the same
/// generated latents.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyDimRun {
    pub dim: usize,
    /// Seed of the per-dimension generator all randomness is drawn from.
    pub seed: u64,
    pub loss_trace: Vec<f64>,
    /// Fresh ground-truth samples the cells are scored against.
    pub truth: Mat,
    pub cells: Vec<ToyCell>,
    /// Set when training diverged; cells then carry NaN distances.
    pub failure: Option<String>,
}

impl ToyDimRun {
    /// Mean loss over the last 100 steps (or fewer if training was shorter).
    pub fn train_loss_final(&self) -> f64 {
        let n = self.loss_trace.len().min(100);
        if n == 0 {
            return f64::NAN;
        }
        self.loss_trace[self.loss_trace.len() - n..].iter().sum::<f64>() / n as f64
    }
}

/// Flat table row.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySweepRow {
    pub dim: usize,
    pub alpha: f64,
    pub seed: u64,
    pub energy_distance: f64,
    pub train_loss_final: f64,
    pub n_samples: usize,
}

/// Runs every α for the `index`-th dimension of `config.dims`.
pub fn run_toy_dim(config: &ToySweepConfig, index: usize, root: &RngState) -> Result<ToyDimRun> {
    let dim = config.dims[index];
    let cell_rng = root.split(index as u64);
    let seed = cell_rng.seed;
    let mut frame_rng = cell_rng.split(0);
    let mut train_rng = cell_rng.split(1);
    let mut sample_rng = cell_rng.split(2);
    let mut truth_rng = cell_rng.split(3);

    let decoder = ToyDecoder::new(&mut frame_rng, dim, 0.0, config.beta)?;
    let embedding = decoder.embedding();
    let mut model = VelocityModel::new(dim, &config.hidden, &mut frame_rng)?;
    let dist = config.distribution.clone();
    let truth = dist.sample(config.n_samples, &mut truth_rng);

    let trained = train_flow(
        &mut model,
        |rng, n| {
            embedding
                .embed(&dist.sample(n, rng))
                .expect("embedding takes 2-D points")
        },
        &config.flow,
        &mut train_rng,
    );
    let loss_trace = match trained {
        Ok(trace) => trace,
        Err(e) => {
            let cells = config
                .alphas
                .iter()
                .map(|&alpha| ToyCell {
                    alpha,
                    energy_distance: f64::NAN,
                    decoded: Mat::zeros(0, 2),
                })
                .collect();
            return Ok(ToyDimRun {
                dim,
                seed,
                loss_trace: Vec::new(),
                truth,
                cells,
                failure: Some(e.to_string()),
            });
        }
    };

    let shift = ShiftSchedule::new(config.flow.shift)?;
    let latents = euler_sample(&model, config.n_samples, config.sample_steps, &shift, &mut sample_rng)?;
    let mut cells = Vec::with_capacity(config.alphas.len());
    for &alpha in &config.alphas {
        let decoded = decoder.with_alpha(alpha).decode_rows(&latents)?;
        cells.push(ToyCell {
            alpha,
            energy_distance: energy_distance(&decoded, &truth)?,
            decoded,
        });
    }
    Ok(ToyDimRun {
        dim,
        seed,
        loss_trace,
        truth,
        cells,
        failure: None,
    })
}

/// Runs the whole grid sequentially, sorted by `D` then `α`.
pub fn run_toy_sweep(config: &ToySweepConfig, seed: u64) -> Result<Vec<ToyDimRun>> {
    let root = RngState::new(seed);
    let mut runs = (0..config.dims.len())
        .map(|i| run_toy_dim(config, i, &root))
        .collect::<Result<Vec<_>>>()?;
    sort_runs(&mut runs);
    Ok(runs)
}

pub fn sort_runs(runs: &mut [ToyDimRun]) {
    runs.sort_by_key(|r| r.dim);
    for r in runs.iter_mut() {
        r.cells.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    }
}

pub fn sweep_rows(runs: &[ToyDimRun], n_samples: usize) -> Vec<ToySweepRow> {
    runs.iter()
        .flat_map(|r| {
            r.cells.iter().map(move |c| ToySweepRow {
                dim: r.dim,
                alpha: c.alpha,
                seed: r.seed,
                energy_distance: c.energy_distance,
                train_loss_final: r.train_loss_final(),
                n_samples,
            })
        })
        .collect()
}
