use alloc::vec;
use alloc::vec::Vec;

use super::signal::FourierBasis;
use crate::numerics::{norm, Mat, RngState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LossWeights {
    /// Weight of the L1 term.
    pub alpha_rec: f64,
    /// Weight of the spectral term.
    pub beta_perc: f64,
    /// Weight of the alignment loss.
    pub eta: f64,
    /// Weight of the adversarial loss.
    pub kappa: f64,
    /// Maximum training noise level.
    pub tau: f64,
    /// Inference noise level.
    pub sigma_bar: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            alpha_rec: 1.0,
            beta_perc: 1.0,
            eta: 5.0,
            kappa: 0.75,
            tau: 0.2,
            sigma_bar: 0.1,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha_rec, self.beta_perc, self.eta, self.kappa, self.tau, self.sigma_bar];
        if all.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("loss weights must be finite and non-negative"));
        }
        if self.tau > 1.0 {
            return Err(Error::InvalidArgument("tau must not exceed 1"));
        }
        Ok(())
    }
}

/// `Σ_k |E_k(x) - E_k(x̄)|` over the per-band mean powers of
/// [`FourierBasis::band_energies`].
pub fn spectral_perc(basis: &FourierBasis, x: &[f64], xbar: &[f64]) -> Result<f64> {
    if x.len() != xbar.len() {
        return Err(Error::dim("spectral_perc", x.len(), xbar.len()));
    }
    let a = basis.band_energies(x)?;
    let b = basis.band_energies(xbar)?;
    Ok(a.iter().zip(&b).map(|(p, q)| (p - q).abs()).sum())
}

/// `alpha_rec · mean|x - x̄| + beta_perc · spectral_perc(x, x̄)`.
pub fn rec_loss(basis: &FourierBasis, x: &[f64], xbar: &[f64], w: &LossWeights) -> Result<f64> {
    if x.len() != xbar.len() {
        return Err(Error::dim("rec_loss", x.len(), xbar.len()));
    }
    if x.is_empty() {
        return Err(Error::Degenerate("rec_loss of empty signals"));
    }
    let l1 = x.iter().zip(xbar).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64;
    Ok(w.alpha_rec * l1 + w.beta_perc * spectral_perc(basis, x, xbar)?)
}

/// Batch mean of [`rec_loss`] and its gradient with respect to `xbar`.
pub fn rec_loss_rows(basis: &FourierBasis, x: &Mat, xbar: &Mat, w: &LossWeights) -> Result<(f64, Mat)> {
    if x.shape() != xbar.shape() {
        return Err(Error::dim("rec_loss_rows", x.cols(), xbar.cols()));
    }
    if x.cols() != basis.n() {
        return Err(Error::dim("rec_loss_rows", basis.n(), x.cols()));
    }
    let (b, n) = (x.rows(), x.cols());
    let bf = b as f64;
    let nf = n as f64;
    let cx = basis.analyze(x)?;
    let cb = basis.analyze(xbar)?;
    let mut loss = 0.0;
    let mut grad = Mat::zeros(b, n);
    // per-row gradient in coefficient space for the spectral term
    let mut gc = Mat::zeros(b, n);
    for i in 0..b {
        let (xr, br) = (x.row(i), xbar.row(i));
        let g = grad.row_mut(i);
        for j in 0..n {
            let d = br[j] - xr[j];
            loss += w.alpha_rec * d.abs() / nf;
            g[j] = if d > 0.0 {
                w.alpha_rec / (nf * bf)
            } else if d < 0.0 {
                -w.alpha_rec / (nf * bf)
            } else {
                0.0
            };
        }
        let mut ex = vec![0.0; basis.num_bands()];
        let mut eb = vec![0.0; basis.num_bands()];
        for k in 0..n {
            ex[basis.band_of(k)] += cx[(i, k)] * cx[(i, k)] / nf;
            eb[basis.band_of(k)] += cb[(i, k)] * cb[(i, k)] / nf;
        }
        let sign: Vec<f64> = ex
            .iter()
            .zip(&eb)
            .map(|(p, q)| {
                loss += w.beta_perc * (q - p).abs();
                if q > p {
                    1.0
                } else if q < p {
                    -1.0
                } else {
                    0.0
                }
            })
            .collect();
        let gr = gc.row_mut(i);
        for k in 0..n {
            gr[k] = w.beta_perc * sign[basis.band_of(k)] * 2.0 * cb[(i, k)] / (nf * bf);
        }
    }
    grad.add_scaled(&basis.synthesize(&gc)?, 1.0)?;
    Ok((loss / bf, grad))
}

/// `‖z - u‖²`.
pub fn align_loss(z: &[f64], u: &[f64]) -> Result<f64> {
    if z.len() != u.len() {
        return Err(Error::dim("align_loss", u.len(), z.len()));
    }
    Ok(z.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `z + σ ε` with `σ ~ U(0, sigma_max)` drawn once per call.
pub fn perturb_latent(z: &[f64], sigma_max: f64, rng: &mut RngState) -> Result<Vec<f64>> {
    if !(sigma_max >= 0.0) {
        return Err(Error::InvalidArgument("sigma_max must be non-negative"));
    }
    let sigma = sigma_max * rng.uniform();
    Ok(z.iter().map(|&x| x + sigma * rng.normal()).collect())
}

/// How training latents are perturbed before decoding.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum NoiseMode {
    /// Per-sample `σ ~ U(0, tau)`.
    Uniform { tau: f64 },
    /// Constant `σ`.
    Fixed { sigma: f64 },
}

impl NoiseMode {
    /// Adds noise to every row, drawing `σ` per row.
    pub fn apply_rows(&self, z: &Mat, rng: &mut RngState) -> Result<Mat> {
        let mut out = z.clone();
        for i in 0..z.rows() {
            let row = out.row_mut(i);
            match *self {
                Self::Uniform { tau } => {
                    let p = perturb_latent(row, tau, rng)?;
                    row.copy_from_slice(&p);
                }
                Self::Fixed { sigma } => {
                    if !(sigma >= 0.0) {
                        return Err(Error::InvalidArgument("noise sigma must be non-negative"));
                    }
                    for v in row.iter_mut() {
                        *v += sigma * rng.normal();
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `‖g_rec‖ / (‖g_gan‖ + 1e-8)` over flattened final-layer gradients.
pub fn adaptive_gan_weight(grad_rec_final: &[f64], grad_gan_final: &[f64]) -> Result<f64> {
    if grad_rec_final.len() != grad_gan_final.len() {
        return Err(Error::dim("adaptive_gan_weight", grad_rec_final.len(), grad_gan_final.len()));
    }
    Ok(norm(grad_rec_final) / (norm(grad_gan_final) + 1e-8))
}

/// Numerically stable `ln(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}
