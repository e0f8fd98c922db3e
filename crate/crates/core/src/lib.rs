//! Desk-scale numerics for residual-latent autoencoders.
//!
//! The crate is `no_std` and only needs `alloc`. Transcendentals go through
//! `libm` and all randomness through [`RngState`], so a fixed seed reproduces
//! the same bits on a given machine. Matrix products use `matrixmultiply`,
//! whose kernels (and so the last bits) may differ between CPUs; enable the
//! `std` feature for runtime SIMD detection. IO, configuration and the command
//! line live in `lvrae-lab`.
//!
//! Modules, bottom-up:
//! - [`numerics`]: dense matrices, counter-based RNG, orthonormal frames, LayerNorm.
//! - [`net`]: MLPs with hand-written backprop, Adam, Gaussian Fourier time embedding.
//! - [`flow`]: linear-path flow matching, time-shift schedule, Euler sampling.
//! - [`manifold`]: 2-D toy data embedded in `D` dims and the analytic off-manifold decoder.
//! - [`lvrae`]: synthetic signals, frozen base map, residual encoder, two-stage training.
//! - [`metrics`]: energy distance, CKNNA, PSNR, decoder amplification.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod flow;
pub mod lvrae;
pub mod manifold;
pub mod metrics;
pub mod net;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::{Mat, RngState};
