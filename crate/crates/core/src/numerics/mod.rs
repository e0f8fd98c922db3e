//! Deterministic linear algebra, sampling and normalization primitives.

mod frame;
mod layer_norm;
mod mat;
mod rng;

pub use frame::{orthonormal_columns, orthonormal_frame};
pub use layer_norm::{
    layer_norm, layer_norm_backward, layer_norm_rows, layer_norm_rows_backward, LayerNormGrads,
    LayerNormParams, DEFAULT_LN_EPS,
};
pub use mat::{axpy, dot, norm, Mat};
pub use rng::{gaussian, mix64, RngState};
