//! Residual latent autoencoder on synthetic signals.
//!
//! Signals are a smooth waveform shifted by a phase `θ` plus random detail in
//! a higher band. A frozen [`BaseMap`] sees only the smooth band and plays the
//! role of a semantic encoder `u = Φ(X)`. The residual encoder adds
//! `r = E([X | u])` and the latent is `z = LayerNorm(r + u)`, which the decoder
//! maps back to signal space.

mod base_map;
mod generate;
mod loss;
mod model;
mod signal;
mod train;

pub use base_map::{base_features, BaseMap};
pub use generate::{lvrae_generation_pipeline, sigma_curve, GenConfig, GenResult};
pub use loss::{
    adaptive_gan_weight, align_loss, perturb_latent, rec_loss, rec_loss_rows, sigmoid, softplus, spectral_perc,
    LossWeights, NoiseMode,
};
pub use model::{decode_generated, encode_residual, make_latent, reconstruct, LvraeModel};
pub use signal::{gen_sample, FourierBasis, Sample, SignalSource, SignalSpec};
pub use train::{
    frozen_checksum, stage1_train, stage2_finetune, Discriminator, Stage1Config, Stage1Trace, Stage2Config,
    Stage2Trace,
};
