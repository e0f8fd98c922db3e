use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            ..Self::default()
        }
    }
}

/// Cosine annealing from `base` at step 0 towards 0 at `total`.
pub fn cosine_lr(base: f64, step: usize, total: usize) -> f64 {
    if total == 0 {
        return base;
    }
    let frac = step.min(total) as f64 / total as f64;
    0.5 * base * (1.0 + libm::cos(core::f64::consts::PI * frac))
}

/// Adam moments for an ordered list of parameter tensors.
///
/// Moments are allocated on the first step from the shapes of the tensors
/// passed in; later steps must pass tensors of the same shapes in the same order.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub config: AdamConfig,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    step: u64,
}

impl AdamState {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            first: Vec::new(),
            second: Vec::new(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moments(&self) -> &[Vec<f64>] {
        &self.first
    }

    pub fn second_moments(&self) -> &[Vec<f64>] {
        &self.second
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::dim("AdamState::step", params.len(), grads.len()));
        }
        for (p, g) in params.iter().zip(grads) {
            if p.len() != g.len() {
                return Err(Error::dim("AdamState::step", p.len(), g.len()));
            }
        }
        if self.first.is_empty() {
            self.first = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.second = self.first.clone();
        } else {
            if self.first.len() != params.len() {
                return Err(Error::dim("AdamState::step", self.first.len(), params.len()));
            }
            for (m, p) in self.first.iter().zip(params.iter()) {
                if m.len() != p.len() {
                    return Err(Error::dim("AdamState::step", m.len(), p.len()));
                }
            }
        }
        self.step += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        let bc1 = 1.0 - libm::pow(beta1, self.step as f64);
        let bc2 = 1.0 - libm::pow(beta2, self.step as f64);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            for k in 0..p.len() {
                let gk = g[k];
                m[k] = beta1 * m[k] + (1.0 - beta1) * gk;
                v[k] = beta2 * v[k] + (1.0 - beta2) * gk * gk;
                let mhat = m[k] / bc1;
                let vhat = v[k] / bc2;
                p[k] -= lr * mhat / (libm::sqrt(vhat) + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_and_decays_moments() {
        let mut fresh = AdamState::new(AdamConfig::default());
        let mut q = vec![1.0, -2.0];
        fresh.step(&mut [&mut q], &[&[0.0, 0.0]]).unwrap();
        assert_eq!(q, vec![1.0, -2.0]);

        let mut adam = AdamState::new(AdamConfig::default());
        let mut p = vec![1.0, -2.0];
        adam.step(&mut [&mut p], &[&[0.5, 0.5]]).unwrap();
        let (m1, v1) = (adam.first_moments()[0][0], adam.second_moments()[0][0]);
        adam.step(&mut [&mut p], &[&[0.0, 0.0]]).unwrap();
        assert!((adam.first_moments()[0][0] - 0.9 * m1).abs() < 1e-15);
        assert!((adam.second_moments()[0][0] - 0.999 * v1).abs() < 1e-15);
    }

    #[test]
    fn cosine_schedule_endpoints() {
        assert_eq!(cosine_lr(1e-3, 0, 100), 1e-3);
        assert!((cosine_lr(1e-3, 50, 100) - 5e-4).abs() < 1e-15);
        assert!(cosine_lr(1e-3, 100, 100).abs() < 1e-18);
        assert_eq!(cosine_lr(1e-3, 7, 0), 1e-3);
    }

    #[test]
    fn first_step_is_lr_times_sign() {
        let cfg = AdamConfig::default();
        let mut adam = AdamState::new(cfg);
        let g = [0.3, -4.0, 1e-3];
        let mut p = vec![0.0; 3];
        adam.step(&mut [&mut p], &[&g]).unwrap();
        for (pk, gk) in p.iter().zip(g) {
            let want = -cfg.lr * gk / (gk.abs() + cfg.eps);
            assert!((pk - want).abs() < 1e-15, "{pk} vs {want}");
        }
    }

    #[test]
    fn constant_gradient_steps_approach_lr() {
        let cfg = AdamConfig::default();
        let mut adam = AdamState::new(cfg);
        let mut p = vec![0.0];
        let mut last = 0.0;
        for _ in 0..2000 {
            let before = p[0];
            adam.step(&mut [&mut p], &[&[2.5]]).unwrap();
            last = before - p[0];
        }
        // with a constant gradient mhat = g and vhat = g^2 exactly
        assert!((last - cfg.lr).abs() < 1e-10, "step {last}");
        assert_eq!(adam.step_count(), 2000);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let mut adam = AdamState::new(AdamConfig::default());
        let mut p = vec![0.0; 2];
        assert!(adam.step(&mut [&mut p], &[&[1.0]]).is_err());
        adam.step(&mut [&mut p], &[&[1.0, 1.0]]).unwrap();
        let mut q = vec![0.0; 3];
        assert!(adam.step(&mut [&mut q], &[&[1.0, 1.0, 1.0]]).is_err());
    }
}
