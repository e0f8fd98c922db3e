use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numerics::{Mat, RngState};

pub const DEFAULT_EMBED_FREQUENCIES: usize = 16;

/// Gaussian Fourier features of a scalar time.
///
/// Frequencies are drawn once from `N(0, scale^2)` and never trained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourierTimeEmbed {
    frequencies: Vec<f64>,
    scale: f64,
}

impl FourierTimeEmbed {
    pub fn new(rng: &mut RngState, count: usize, scale: f64) -> Self {
        Self {
            frequencies: (0..count).map(|_| scale * rng.normal()).collect(),
            scale,
        }
    }

    pub fn from_frequencies(frequencies: Vec<f64>, scale: f64) -> Self {
        Self { frequencies, scale }
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Output width: a cosine and a sine per frequency.
    pub fn dim(&self) -> usize {
        2 * self.frequencies.len()
    }

    /// `[cos(2π f_i t)..., sin(2π f_i t)...]`.
    pub fn embed(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        self.write(t, &mut out);
        out
    }

    fn write(&self, t: f64, out: &mut Vec<f64>) {
        out.extend(self.frequencies.iter().map(|f| libm::cos(2.0 * PI * f * t)));
        out.extend(self.frequencies.iter().map(|f| libm::sin(2.0 * PI * f * t)));
    }

    /// One embedding row per time.
    pub fn embed_rows(&self, times: &[f64]) -> Mat {
        let mut data = Vec::with_capacity(times.len() * self.dim());
        for &t in times {
            self.write(t, &mut data);
        }
        Mat::from_vec(times.len(), self.dim(), data).expect("consistent widths")
    }
}
