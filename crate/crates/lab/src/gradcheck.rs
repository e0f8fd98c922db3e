//! Central finite-difference checks of every hand-written derivative.

use lvrae_core::flow::{fm_loss, ShiftSchedule, TrainBatch, VelocityModel};
use lvrae_core::lvrae::{rec_loss_rows, FourierBasis, LossWeights};
use lvrae_core::manifold::ToyDecoder;
use lvrae_core::net::Mlp;
use lvrae_core::numerics::{gaussian, layer_norm_rows, layer_norm_rows_backward, LayerNormParams};
use lvrae_core::{Mat, Result, RngState};

use crate::config::GradCheckConfig;

pub const GRAD_TOL: f64 = 1e-5;
pub const JACOBIAN_TOL: f64 = 1e-6;

/// Values below this magnitude are compared absolutely.
const FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_rel_err: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_rel_err < self.tolerance
    }
}

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FLOOR)
}

fn central(f: &mut impl FnMut(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// `(slice, offset)` pairs drawn uniformly over all parameters.
fn pick_coords(sizes: &[usize], count: usize, rng: &mut RngState) -> Vec<(usize, usize)> {
    let total: usize = sizes.iter().sum();
    (0..count.min(total))
        .map(|_| {
            let mut k = rng.below(total);
            let mut s = 0;
            while k >= sizes[s] {
                k -= sizes[s];
                s += 1;
            }
            (s, k)
        })
        .collect()
}

fn weighted_sum(a: &Mat, w: &Mat) -> f64 {
    a.as_slice().iter().zip(w.as_slice()).map(|(x, y)| x * y).sum()
}

fn mlp_param_check(
    net: &mut Mlp,
    analytic: &[Vec<f64>],
    mut loss: impl FnMut(&Mlp) -> Result<f64>,
    cfg: &GradCheckConfig,
    rng: &mut RngState,
) -> Result<f64> {
    let sizes: Vec<usize> = analytic.iter().map(Vec::len).collect();
    let mut worst = 0.0f64;
    for (s, k) in pick_coords(&sizes, cfg.coords, rng) {
        let x0 = net.param_slices()[s][k];
        let numeric = central(
            &mut |v| {
                net.param_slices_mut()[s][k] = v;
                loss(net)
            },
            x0,
            cfg.step,
        )?;
        net.param_slices_mut()[s][k] = x0;
        worst = worst.max(rel_err(analytic[s][k], numeric));
    }
    Ok(worst)
}

/// Parameter and input gradients of `Σ R ⊙ net(X)`.
pub fn check_mlp(cfg: &GradCheckConfig, rng: &mut RngState) -> Result<CheckResult> {
    let mut net = Mlp::new(&[5, 16, 12, 3], rng)?;
    // nonzero biases keep ReLU kinks away from the sampled points
    for s in net.param_slices_mut() {
        for v in s.iter_mut() {
            *v += 0.05 * rng.normal();
        }
    }
    let x = gaussian(rng, 7, 5);
    let r = gaussian(rng, 7, 3);
    let (_, cache) = net.forward(&x)?;
    let (grads, dx) = net.backward(&cache, &r)?;
    let analytic: Vec<Vec<f64>> = grads.slices().iter().map(|s| s.to_vec()).collect();
    let mut worst = mlp_param_check(&mut net, &analytic, |n| Ok(weighted_sum(&n.predict(&x)?, &r)), cfg, rng)?;
    for i in 0..x.as_slice().len() {
        let mut xp = x.clone();
        let numeric = central(
            &mut |v| {
                xp.as_mut_slice()[i] = v;
                Ok(weighted_sum(&net.predict(&xp)?, &r))
            },
            x.as_slice()[i],
            cfg.step,
        )?;
        worst = worst.max(rel_err(dx.as_slice()[i], numeric));
    }
    Ok(CheckResult {
        name: "mlp_backward",
        max_rel_err: worst,
        tolerance: GRAD_TOL,
    })
}

/// Input, gain and bias gradients of `Σ R ⊙ LayerNorm(X)`.
pub fn check_layer_norm(cfg: &GradCheckConfig, rng: &mut RngState) -> Result<CheckResult> {
    let d = 9;
    let gain: Vec<f64> = (0..d).map(|_| 1.0 + 0.3 * rng.normal()).collect();
    let bias: Vec<f64> = (0..d).map(|_| 0.3 * rng.normal()).collect();
    let p = LayerNormParams::new(gain, bias, 1e-6)?;
    let x = gaussian(rng, 4, d);
    let r = gaussian(rng, 4, d);
    let g = layer_norm_rows_backward(&x, &p, &r)?;
    let f = |x: &Mat, p: &LayerNormParams| -> Result<f64> { Ok(weighted_sum(&layer_norm_rows(x, p)?, &r)) };
    let mut worst = 0.0f64;
    for i in 0..x.as_slice().len() {
        let mut xp = x.clone();
        let numeric = central(
            &mut |v| {
                xp.as_mut_slice()[i] = v;
                f(&xp, &p)
            },
            x.as_slice()[i],
            cfg.step,
        )?;
        worst = worst.max(rel_err(g.input[i], numeric));
    }
    for j in 0..d {
        let mut pp = p.clone();
        let numeric = central(
            &mut |v| {
                pp.gain[j] = v;
                f(&x, &pp)
            },
            p.gain[j],
            cfg.step,
        )?;
        worst = worst.max(rel_err(g.gain[j], numeric));
        let mut pp = p.clone();
        let numeric = central(
            &mut |v| {
                pp.bias[j] = v;
                f(&x, &pp)
            },
            p.bias[j],
            cfg.step,
        )?;
        worst = worst.max(rel_err(g.bias[j], numeric));
    }
    Ok(CheckResult {
        name: "layer_norm_backward",
        max_rel_err: worst,
        tolerance: GRAD_TOL,
    })
}

/// Parameter gradient of the flow-matching loss on a fixed batch, with a time shift.
pub fn check_fm_loss(cfg: &GradCheckConfig, rng: &mut RngState) -> Result<CheckResult> {
    let mut model = VelocityModel::new(3, &[16, 16], rng)?;
    let batch = TrainBatch::draw(gaussian(rng, 8, 3), rng);
    let shift = ShiftSchedule::new(2.5)?;
    let (_, grads) = fm_loss(&model, &batch, &shift)?;
    let analytic: Vec<Vec<f64>> = grads.slices().iter().map(|s| s.to_vec()).collect();
    let embed = model.embed.clone();
    let worst = mlp_param_check(
        &mut model.net,
        &analytic,
        |n| {
            let m = VelocityModel {
                net: n.clone(),
                embed: embed.clone(),
            };
            Ok(fm_loss(&m, &batch, &shift)?.0)
        },
        cfg,
        rng,
    )?;
    Ok(CheckResult {
        name: "fm_loss",
        max_rel_err: worst,
        tolerance: GRAD_TOL,
    })
}

/// Gradient of the L1 + spectral reconstruction loss with respect to `X̄`.
pub fn check_rec_loss(cfg: &GradCheckConfig, rng: &mut RngState) -> Result<CheckResult> {
    let n = 16;
    let basis = FourierBasis::new(n)?;
    let w = LossWeights::default();
    let x = gaussian(rng, 3, n);
    let xbar = gaussian(rng, 3, n);
    let (_, g) = rec_loss_rows(&basis, &x, &xbar, &w)?;
    let mut worst = 0.0f64;
    for i in 0..xbar.as_slice().len() {
        let mut xp = xbar.clone();
        let numeric = central(
            &mut |v| {
                xp.as_mut_slice()[i] = v;
                Ok(rec_loss_rows(&basis, &x, &xp, &w)?.0)
            },
            xbar.as_slice()[i],
            cfg.step,
        )?;
        worst = worst.max(rel_err(g.as_slice()[i], numeric));
    }
    Ok(CheckResult {
        name: "rec_loss",
        max_rel_err: worst,
        tolerance: GRAD_TOL,
    })
}

/// Analytic toy-decoder Jacobian against finite differences over random
/// `(D, α, β, z)`.
pub fn check_toy_jacobian(cfg: &GradCheckConfig, rng: &mut RngState) -> Result<CheckResult> {
    let dims = [3usize, 4, 8, 16, 32, 64, 128];
    let mut worst = 0.0f64;
    for _ in 0..cfg.jacobian_configs {
        let d = dims[rng.below(dims.len())];
        let alpha = rng.uniform_range(0.0, 2.0);
        let beta = rng.uniform_range(0.25, 2.0);
        let dec = ToyDecoder::new(rng, d, alpha, beta)?;
        let z: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let j = dec.jacobian(&z)?;
        for i in 0..d {
            let mut zp = z.clone();
            zp[i] = z[i] + cfg.step;
            let hi = dec.decode(&zp)?;
            zp[i] = z[i] - cfg.step;
            let lo = dec.decode(&zp)?;
            for a in 0..2 {
                let numeric = (hi[a] - lo[a]) / (2.0 * cfg.step);
                worst = worst.max(rel_err(j[(a, i)], numeric));
            }
        }
    }
    Ok(CheckResult {
        name: "toy_jacobian",
        max_rel_err: worst,
        tolerance: JACOBIAN_TOL,
    })
}

/// Every check, each with its own split of `rng`.
pub fn run_all(cfg: &GradCheckConfig, rng: &RngState) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_mlp(cfg, &mut rng.split(0))?,
        check_layer_norm(cfg, &mut rng.split(1))?,
        check_fm_loss(cfg, &mut rng.split(2))?,
        check_rec_loss(cfg, &mut rng.split(3))?,
        check_toy_jacobian(cfg, &mut rng.split(4))?,
    ])
}
