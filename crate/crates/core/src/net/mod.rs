//! Small MLPs with explicit backpropagation, Adam, and a Fourier time embedding.

mod adam;
mod embed;
mod mlp;

pub use adam::{cosine_lr, AdamConfig, AdamState};
pub use embed::{FourierTimeEmbed, DEFAULT_EMBED_FREQUENCIES};
pub use mlp::{ForwardCache, Linear, Mlp, MlpGrads};
