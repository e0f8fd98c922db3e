use alloc::string::String;
use alloc::vec::Vec;

use super::base_map::BaseMap;
use super::loss::{adaptive_gan_weight, rec_loss_rows, sigmoid, softplus, LossWeights, NoiseMode};
use super::model::LvraeModel;
use super::signal::SignalSource;
use crate::net::{cosine_lr, AdamConfig, AdamState, Mlp};
use crate::numerics::{layer_norm_rows, layer_norm_rows_backward, Mat, RngState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Stage1Config {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub cosine_decay: bool,
    /// Fraction of steps over which the alignment weight ramps linearly from
    /// 0 to `eta`.
    pub eta_warmup_frac: f64,
}

impl Default for Stage1Config {
    fn default() -> Self {
        Self {
            steps: 20_000,
            batch_size: 64,
            lr: 1e-3,
            cosine_decay: true,
            eta_warmup_frac: 0.0,
        }
    }
}

impl Stage1Config {
    /// Alignment weight in effect at `step`.
    pub fn eta_at(&self, eta: f64, step: usize) -> f64 {
        let ramp = self.eta_warmup_frac * self.steps as f64;
        if ramp <= 0.0 || step as f64 >= ramp {
            eta
        } else {
            eta * step as f64 / ramp
        }
    }
}

/// Per-step batch means.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stage1Trace {
    pub rec: Vec<f64>,
    pub align: Vec<f64>,
}

/// Jointly trains encoder, latent norm and decoder on
/// `rec_loss + eta · align_loss` with fresh batches every step.
pub fn stage1_train(
    m: &mut LvraeModel,
    phi: &BaseMap,
    src: &SignalSource,
    w: &LossWeights,
    cfg: &Stage1Config,
    rng: &mut RngState,
) -> Result<Stage1Trace> {
    w.validate()?;
    if cfg.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive"));
    }
    let mut adam = AdamState::new(AdamConfig::with_lr(cfg.lr));
    let mut trace = Stage1Trace {
        rec: Vec::with_capacity(cfg.steps),
        align: Vec::with_capacity(cfg.steps),
    };
    let bf = cfg.batch_size as f64;
    for step in 0..cfg.steps {
        if cfg.cosine_decay {
            adam.config.lr = cosine_lr(cfg.lr, step, cfg.steps);
        }
        let (x, _) = src.batch(cfg.batch_size, rng);
        let u = phi.features_rows(&x)?;
        let (r, enc_cache) = m.encoder.forward(&x.hcat(&u)?)?;
        let s = r.add(&u)?;
        let z = layer_norm_rows(&s, &m.latent_ln)?;
        let (xbar, dec_cache) = m.decoder.forward(&z)?;
        let (rec, g_out) = rec_loss_rows(src.basis(), &x, &xbar, w)?;
        let diff = z.sub(&u)?;
        let align = diff.as_slice().iter().map(|d| d * d).sum::<f64>() / bf;
        if !(rec + w.eta * align).is_finite() {
            return Err(Error::NonFinite {
                what: "stage-1 loss",
                step,
            });
        }
        let (dec_grads, mut g_z) = m.decoder.backward(&dec_cache, &g_out)?;
        g_z.add_scaled(&diff, 2.0 * cfg.eta_at(w.eta, step) / bf)?;
        let ln_grads = layer_norm_rows_backward(&s, &m.latent_ln, &g_z)?;
        let g_s = Mat::from_vec(s.rows(), s.cols(), ln_grads.input)?;
        let (enc_grads, _) = m.encoder.backward(&enc_cache, &g_s)?;

        let mut grads: Vec<&[f64]> = enc_grads.slices();
        grads.push(&ln_grads.gain);
        grads.push(&ln_grads.bias);
        grads.extend(dec_grads.slices());
        let mut params: Vec<&mut [f64]> = m.encoder.param_slices_mut();
        params.push(&mut m.latent_ln.gain);
        params.push(&mut m.latent_ln.bias);
        params.extend(m.decoder.param_slices_mut());
        adam.step(&mut params, &grads)?;

        trace.rec.push(rec);
        trace.align.push(align);
    }
    Ok(trace)
}

/// MLP critic on signals; outputs a logit.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    pub net: Mlp,
}

impl Discriminator {
    pub fn new(n: usize, hidden: &[usize], rng: &mut RngState) -> Result<Self> {
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(n);
        dims.extend_from_slice(hidden);
        dims.push(1);
        Ok(Self { net: Mlp::new(&dims, rng)? })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Stage2Config {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub cosine_decay: bool,
    /// Fraction of steps trained on reconstruction only.
    pub warmup_frac: f64,
    /// `None` draws `σ ~ U(0, tau)` per sample; `Some(s)` uses `σ = s`.
    pub fixed_sigma: Option<f64>,
}

impl Default for Stage2Config {
    fn default() -> Self {
        Self {
            steps: 5000,
            batch_size: 64,
            lr: 1e-3,
            cosine_decay: true,
            warmup_frac: 0.1,
            fixed_sigma: None,
        }
    }
}

impl Stage2Config {
    pub fn noise_mode(&self, w: &LossWeights) -> NoiseMode {
        match self.fixed_sigma {
            Some(sigma) => NoiseMode::Fixed { sigma },
            None => NoiseMode::Uniform { tau: w.tau },
        }
    }

    pub fn warmup_steps(&self) -> usize {
        libm::round(self.warmup_frac.clamp(0.0, 1.0) * self.steps as f64) as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stage2Trace {
    pub rec: Vec<f64>,
    /// Generator loss; NaN during warmup.
    pub gan: Vec<f64>,
    /// Discriminator loss; NaN during warmup.
    pub disc: Vec<f64>,
    /// Adaptive weight; NaN during warmup.
    pub gan_weight: Vec<f64>,
    pub warnings: Vec<String>,
}

const COLLAPSE_LOSS: f64 = 1e-6;
const COLLAPSE_STEPS: usize = 100;

/// Fine-tunes only the decoder on noisy latents, adding a non-saturating GAN
/// loss after warmup. Encoder and latent norm are read but never written.
pub fn stage2_finetune(
    m: &mut LvraeModel,
    phi: &BaseMap,
    disc: &mut Discriminator,
    src: &SignalSource,
    w: &LossWeights,
    cfg: &Stage2Config,
    rng: &mut RngState,
) -> Result<Stage2Trace> {
    w.validate()?;
    if cfg.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive"));
    }
    if disc.net.input_dim() != m.signal_dim() || disc.net.output_dim() != 1 {
        return Err(Error::dim("stage2_finetune", m.signal_dim(), disc.net.input_dim()));
    }
    let noise = cfg.noise_mode(w);
    let warmup = cfg.warmup_steps();
    let mut dec_adam = AdamState::new(AdamConfig::with_lr(cfg.lr));
    let mut disc_adam = AdamState::new(AdamConfig::with_lr(cfg.lr));
    let mut trace = Stage2Trace::default();
    let bf = cfg.batch_size as f64;
    let mut low_disc_run = 0usize;
    let mut warned = false;
    for step in 0..cfg.steps {
        if cfg.cosine_decay {
            let lr = cosine_lr(cfg.lr, step, cfg.steps);
            dec_adam.config.lr = lr;
            disc_adam.config.lr = lr;
        }
        let (x, _) = src.batch(cfg.batch_size, rng);
        let z = m.encode_rows(phi, &x)?;
        let zn = noise.apply_rows(&z, rng)?;
        let (xbar, dec_cache) = m.decoder.forward(&zn)?;
        let (rec, g_out) = rec_loss_rows(src.basis(), &x, &xbar, w)?;
        let (mut grads, _) = m.decoder.backward(&dec_cache, &g_out)?;
        let (mut gan, mut dloss, mut wgan) = (f64::NAN, f64::NAN, f64::NAN);

        if step >= warmup && w.kappa > 0.0 {
            let (logit_fake, dc) = disc.net.forward(&xbar)?;
            gan = logit_fake.as_slice().iter().map(|&l| softplus(-l)).sum::<f64>() / bf;
            let up = logit_fake.map(|l| -sigmoid(-l) / bf);
            let (_, g_xbar) = disc.net.backward(&dc, &up)?;
            let (gan_grads, _) = m.decoder.backward(&dec_cache, &g_xbar)?;
            wgan = adaptive_gan_weight(&grads.output_layer_flat(), &gan_grads.output_layer_flat())?;
            grads.add_scaled(&gan_grads, w.kappa * wgan)?;

            let (logit_real, rc) = disc.net.forward(&x)?;
            let (logit_fake, fc) = disc.net.forward(&xbar)?;
            dloss = (logit_real.as_slice().iter().map(|&l| softplus(-l)).sum::<f64>()
                + logit_fake.as_slice().iter().map(|&l| softplus(l)).sum::<f64>())
                / bf;
            let (mut dg, _) = disc.net.backward(&rc, &logit_real.map(|l| -sigmoid(-l) / bf))?;
            let (dg_fake, _) = disc.net.backward(&fc, &logit_fake.map(|l| sigmoid(l) / bf))?;
            dg.add_scaled(&dg_fake, 1.0)?;
            if !dloss.is_finite() || !dg.is_finite() {
                return Err(Error::NonFinite {
                    what: "discriminator loss",
                    step,
                });
            }
            disc_adam.step(&mut disc.net.param_slices_mut(), &dg.slices())?;

            if dloss < COLLAPSE_LOSS {
                low_disc_run += 1;
                if low_disc_run >= COLLAPSE_STEPS && !warned {
                    warned = true;
                    trace.warnings.push(alloc::format!(
                        "discriminator loss below {COLLAPSE_LOSS:e} for {COLLAPSE_STEPS} consecutive steps (step {step})"
                    ));
                }
            } else {
                low_disc_run = 0;
            }
        }
        if !rec.is_finite() || !grads.is_finite() || (step >= warmup && w.kappa > 0.0 && !gan.is_finite()) {
            return Err(Error::NonFinite {
                what: "stage-2 decoder loss",
                step,
            });
        }
        dec_adam.step(&mut m.decoder.param_slices_mut(), &grads.slices())?;
        trace.rec.push(rec);
        trace.gan.push(gan);
        trace.disc.push(dloss);
        trace.gan_weight.push(wgan);
    }
    Ok(trace)
}

/// FNV-1a hash over the bits of every encoder and latent-norm parameter.
pub fn frozen_checksum(m: &LvraeModel) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |v: f64| {
        h ^= v.to_bits();
        h = h.wrapping_mul(0x100000001b3);
    };
    for s in m.encoder.param_slices() {
        s.iter().for_each(|&v| eat(v));
    }
    m.latent_ln.gain.iter().chain(&m.latent_ln.bias).for_each(|&v| eat(v));
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lvrae::signal::SignalSpec;

    fn setup() -> (SignalSource, BaseMap, LvraeModel) {
        let spec = SignalSpec::default();
        let mut rng = RngState::new(21);
        let phi = BaseMap::new(&spec, 32, &mut rng).unwrap();
        let m = LvraeModel::new(&phi, &[32], &[32], &mut rng).unwrap();
        (SignalSource::new(spec).unwrap(), phi, m)
    }

    #[test]
    fn zero_steps_leave_model_unchanged() {
        let (src, phi, mut m) = setup();
        let before = m.clone();
        let cfg = Stage1Config {
            steps: 0,
            ..Stage1Config::default()
        };
        let t = stage1_train(&mut m, &phi, &src, &LossWeights::default(), &cfg, &mut RngState::new(1)).unwrap();
        assert!(t.rec.is_empty() && t.align.is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn short_stage1_reduces_reconstruction() {
        let (src, phi, mut m) = setup();
        let cfg = Stage1Config {
            steps: 300,
            batch_size: 16,
            ..Stage1Config::default()
        };
        let t = stage1_train(&mut m, &phi, &src, &LossWeights::default(), &cfg, &mut RngState::new(2)).unwrap();
        let head = t.rec[..20].iter().sum::<f64>() / 20.0;
        let tail = t.rec[280..].iter().sum::<f64>() / 20.0;
        assert!(tail < head, "{head} -> {tail}");
    }

    #[test]
    fn stage2_touches_only_the_decoder() {
        let (src, phi, mut m) = setup();
        let mut disc = Discriminator::new(64, &[16], &mut RngState::new(3)).unwrap();
        let before = m.clone();
        let sum = frozen_checksum(&m);
        let cfg = Stage2Config {
            steps: 30,
            batch_size: 8,
            ..Stage2Config::default()
        };
        let t = stage2_finetune(&mut m, &phi, &mut disc, &src, &LossWeights::default(), &cfg, &mut RngState::new(4)).unwrap();
        assert_eq!(frozen_checksum(&m), sum);
        assert_eq!(m.encoder, before.encoder);
        assert_eq!(m.latent_ln, before.latent_ln);
        assert_ne!(m.decoder, before.decoder);
        assert!(t.gan[..3].iter().all(|g| g.is_nan()));
        assert!(t.gan[3..].iter().all(|g| g.is_finite()));
    }

    #[test]
    fn zero_kappa_never_touches_the_discriminator() {
        let (src, phi, mut m) = setup();
        let mut disc = Discriminator::new(64, &[16], &mut RngState::new(3)).unwrap();
        let d0 = disc.clone();
        let w = LossWeights {
            kappa: 0.0,
            ..LossWeights::default()
        };
        let cfg = Stage2Config {
            steps: 10,
            batch_size: 8,
            ..Stage2Config::default()
        };
        let t = stage2_finetune(&mut m, &phi, &mut disc, &src, &w, &cfg, &mut RngState::new(4)).unwrap();
        assert_eq!(disc, d0);
        assert!(t.gan.iter().all(|g| g.is_nan()));
    }
}
