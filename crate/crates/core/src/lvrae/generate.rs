use alloc::vec;
use alloc::vec::Vec;

use super::base_map::BaseMap;
use super::model::{decode_generated, LvraeModel};
use super::signal::SignalSource;
use crate::flow::{euler_sample, train_flow, FlowTrainConfig, ShiftSchedule, VelocityModel};
use crate::metrics::energy_distance;
use crate::numerics::{Mat, RngState};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GenConfig {
    /// `shift` is ignored; the pipeline derives it from the latent size.
    pub flow: FlowTrainConfig,
    pub hidden: Vec<usize>,
    pub sample_steps: usize,
    pub n_samples: usize,
    pub sigma_bars: Vec<f64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            flow: FlowTrainConfig {
                steps: 2000,
                ..FlowTrainConfig::default()
            },
            hidden: vec![256; 3],
            sample_steps: 100,
            n_samples: 1000,
            sigma_bars: vec![0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenResult {
    pub loss_trace: Vec<f64>,
    /// Generated latents before noise injection.
    pub latents: Mat,
    /// `(sigma_bar, energy distance)` per grid point.
    pub curve: Vec<(f64, f64)>,
}

impl GenResult {
    /// Grid point with the smallest distance (first on ties).
    pub fn best(&self) -> Option<(f64, f64)> {
        self.curve
            .iter()
            .copied()
            .fold(None, |acc: Option<(f64, f64)>, p| match acc {
                Some(a) if a.1 <= p.1 => Some(a),
                _ => Some(p),
            })
    }
}

/// Trains a flow on latents of fresh signals, samples latents, and scores
/// `decode_generated` at every `sigma_bar` against fresh real signals.
///
/// Randomness: `rng.split(0)` model init, `split(1)` training, `split(2)`
/// sampling, `split(3)` reference signals, `split(4 + k)` noise of grid point `k`.
pub fn lvrae_generation_pipeline(
    m: &LvraeModel,
    phi: &BaseMap,
    src: &SignalSource,
    cfg: &GenConfig,
    rng: &RngState,
) -> Result<GenResult> {
    let d_u = m.latent_dim();
    let shift = ShiftSchedule::for_latent(d_u, 1, 1);
    let flow_cfg = FlowTrainConfig {
        shift: shift.coefficient(),
        ..cfg.flow.clone()
    };
    let mut model = VelocityModel::new(d_u, &cfg.hidden, &mut rng.split(0))?;
    let loss_trace = train_flow(
        &mut model,
        |r, n| {
            let (x, _) = src.batch(n, r);
            m.encode_rows(phi, &x).expect("model matches its base map")
        },
        &flow_cfg,
        &mut rng.split(1),
    )?;
    let latents = euler_sample(&model, cfg.n_samples, cfg.sample_steps, &shift, &mut rng.split(2))?;
    let (reference, _) = src.batch(cfg.n_samples, &mut rng.split(3));
    let curve = sigma_curve(m, &latents, &reference, &cfg.sigma_bars, rng)?;
    Ok(GenResult {
        loss_trace,
        latents,
        curve,
    })
}

/// Energy distance of `decode_generated(latents, σ̄)` to `reference` for every
/// `σ̄`; noise for grid point `k` comes from `rng.split(4 + k)`.
pub fn sigma_curve(
    m: &LvraeModel,
    latents: &Mat,
    reference: &Mat,
    sigma_bars: &[f64],
    rng: &RngState,
) -> Result<Vec<(f64, f64)>> {
    sigma_bars
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let x = decode_generated(m, latents, s, &mut rng.split(4 + k as u64))?;
            Ok((s, energy_distance(&x, reference)?))
        })
        .collect()
}
