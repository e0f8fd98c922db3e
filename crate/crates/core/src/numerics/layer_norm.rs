use alloc::vec;
use alloc::vec::Vec;

use super::Mat;
use crate::{Error, Result};

pub const DEFAULT_LN_EPS: f64 = 1e-6;

/// Per-feature affine parameters of a LayerNorm.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LayerNormParams {
    pub gain: Vec<f64>,
    pub bias: Vec<f64>,
    pub eps: f64,
}

impl LayerNormParams {
    /// Unit gain, zero bias.
    pub fn identity(dim: usize) -> Self {
        Self {
            gain: vec![1.0; dim],
            bias: vec![0.0; dim],
            eps: DEFAULT_LN_EPS,
        }
    }

    pub fn new(gain: Vec<f64>, bias: Vec<f64>, eps: f64) -> Result<Self> {
        if gain.len() != bias.len() {
            return Err(Error::dim("LayerNormParams::new", gain.len(), bias.len()));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument("layer norm eps must be positive"));
        }
        Ok(Self { gain, bias, eps })
    }

    pub fn dim(&self) -> usize {
        self.gain.len()
    }
}

struct Normalized {
    xhat: Vec<f64>,
    inv_std: f64,
}

fn normalize(v: &[f64], eps: f64) -> Normalized {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let inv_std = 1.0 / libm::sqrt(var + eps);
    Normalized {
        xhat: v.iter().map(|x| (x - mean) * inv_std).collect(),
        inv_std,
    }
}

/// `gain * (v - mean) / sqrt(var + eps) + bias` with population variance.
pub fn layer_norm(v: &[f64], p: &LayerNormParams) -> Result<Vec<f64>> {
    if v.len() != p.dim() {
        return Err(Error::dim("layer_norm", p.dim(), v.len()));
    }
    let Normalized { xhat, .. } = normalize(v, p.eps);
    Ok(xhat
        .iter()
        .zip(&p.gain)
        .zip(&p.bias)
        .map(|((x, g), b)| g * x + b)
        .collect())
}

/// Gradients of a LayerNorm given the upstream gradient at its output.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormGrads {
    pub input: Vec<f64>,
    pub gain: Vec<f64>,
    pub bias: Vec<f64>,
}

pub fn layer_norm_backward(
    v: &[f64],
    p: &LayerNormParams,
    upstream: &[f64],
) -> Result<LayerNormGrads> {
    if v.len() != p.dim() {
        return Err(Error::dim("layer_norm_backward", p.dim(), v.len()));
    }
    if upstream.len() != p.dim() {
        return Err(Error::dim("layer_norm_backward", p.dim(), upstream.len()));
    }
    let Normalized { xhat, inv_std } = normalize(v, p.eps);
    let n = v.len() as f64;
    let dxhat: Vec<f64> = upstream.iter().zip(&p.gain).map(|(u, g)| u * g).collect();
    let mean_d = dxhat.iter().sum::<f64>() / n;
    let mean_dx = dxhat.iter().zip(&xhat).map(|(d, x)| d * x).sum::<f64>() / n;
    Ok(LayerNormGrads {
        input: dxhat
            .iter()
            .zip(&xhat)
            .map(|(d, x)| inv_std * (d - mean_d - x * mean_dx))
            .collect(),
        gain: upstream.iter().zip(&xhat).map(|(u, x)| u * x).collect(),
        bias: upstream.to_vec(),
    })
}

/// Row-wise [`layer_norm`] over a batch.
pub fn layer_norm_rows(m: &Mat, p: &LayerNormParams) -> Result<Mat> {
    let mut out = Mat::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        let y = layer_norm(m.row(i), p)?;
        out.row_mut(i).copy_from_slice(&y);
    }
    Ok(out)
}

/// Row-wise backward; parameter gradients are summed over rows.
pub fn layer_norm_rows_backward(
    m: &Mat,
    p: &LayerNormParams,
    upstream: &Mat,
) -> Result<LayerNormGrads> {
    if upstream.rows() != m.rows() {
        return Err(Error::dim("layer_norm_rows_backward", m.rows(), upstream.rows()));
    }
    let mut input = Vec::with_capacity(m.rows() * m.cols());
    let mut gain = vec![0.0; p.dim()];
    let mut bias = vec![0.0; p.dim()];
    for i in 0..m.rows() {
        let g = layer_norm_backward(m.row(i), p, upstream.row(i))?;
        input.extend_from_slice(&g.input);
        for (acc, x) in gain.iter_mut().zip(&g.gain) {
            *acc += x;
        }
        for (acc, x) in bias.iter_mut().zip(&g.bias) {
            *acc += x;
        }
    }
    Ok(LayerNormGrads { input, gain, bias })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gaussian, RngState};

    #[test]
    fn constant_input_maps_to_bias() {
        let p = LayerNormParams::identity(5);
        let y = layer_norm(&[3.0; 5], &p).unwrap();
        assert!(y.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn plus_minus_one_is_fixed_point() {
        let mut p = LayerNormParams::identity(2);
        p.eps = 1e-15;
        let y = layer_norm(&[1.0, -1.0], &p).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_outputs_bias() {
        let p = LayerNormParams::new(vec![0.0; 3], vec![0.5, -1.0, 2.0], 1e-6).unwrap();
        assert_eq!(layer_norm(&[1.0, 5.0, -2.0], &p).unwrap(), p.bias);
    }

    #[test]
    fn normalized_moments() {
        let v = gaussian(&mut RngState::new(4), 1, 32).into_vec();
        let y = layer_norm(&v, &LayerNormParams::identity(32)).unwrap();
        let mean = y.iter().sum::<f64>() / 32.0;
        let var = y.iter().map(|x| x * x).sum::<f64>() / 32.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-5);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let p = LayerNormParams::identity(3);
        assert!(layer_norm(&[1.0, 2.0], &p).is_err());
        assert!(layer_norm_backward(&[1.0, 2.0, 3.0], &p, &[1.0]).is_err());
        assert!(LayerNormParams::new(vec![1.0], vec![], 1e-6).is_err());
        assert!(LayerNormParams::new(vec![1.0], vec![0.0], 0.0).is_err());
    }

    #[test]
    fn zero_upstream_gives_zero_grads() {
        let p = LayerNormParams::identity(4);
        let g = layer_norm_backward(&[1.0, 2.0, 0.5, -3.0], &p, &[0.0; 4]).unwrap();
        assert!(g.input.iter().chain(&g.gain).chain(&g.bias).all(|&x| x == 0.0));
    }

    #[test]
    fn bias_grad_equals_upstream_on_standardized_input() {
        let p = LayerNormParams::identity(2);
        let up = [0.3, -0.7];
        let g = layer_norm_backward(&[1.0, -1.0], &p, &up).unwrap();
        assert_eq!(g.bias, up.to_vec());
    }

    #[test]
    fn backward_matches_central_differences() {
        let mut rng = RngState::new(9);
        let v = gaussian(&mut rng, 1, 8).into_vec();
        let gain: Vec<f64> = gaussian(&mut rng, 1, 8).as_slice().iter().map(|g| 1.0 + 0.3 * g).collect();
        let bias = gaussian(&mut rng, 1, 8).into_vec();
        let up = gaussian(&mut rng, 1, 8).into_vec();
        let p = LayerNormParams::new(gain, bias, 1e-6).unwrap();
        let loss = |v: &[f64], p: &LayerNormParams| -> f64 {
            layer_norm(v, p).unwrap().iter().zip(&up).map(|(y, u)| y * u).sum()
        };
        let g = layer_norm_backward(&v, &p, &up).unwrap();
        let h = 1e-5;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-8);
        for i in 0..8 {
            let (mut vp, mut vm) = (v.clone(), v.clone());
            vp[i] += h;
            vm[i] -= h;
            let fd = (loss(&vp, &p) - loss(&vm, &p)) / (2.0 * h);
            assert!(rel(fd, g.input[i]) < 1e-5, "input {i}: {fd} vs {}", g.input[i]);

            let (mut pp, mut pm) = (p.clone(), p.clone());
            pp.gain[i] += h;
            pm.gain[i] -= h;
            let fd = (loss(&v, &pp) - loss(&v, &pm)) / (2.0 * h);
            assert!(rel(fd, g.gain[i]) < 1e-5);
        }
    }
}
