use alloc::vec::Vec;

use super::base_map::BaseMap;
use crate::net::Mlp;
use crate::numerics::{gaussian, layer_norm, layer_norm_rows, LayerNormParams, Mat, RngState};
use crate::{Error, Result};

/// Residual encoder, trainable latent norm, and decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct LvraeModel {
    /// `[X | u] -> r`, output layer zero-initialized.
    pub encoder: Mlp,
    pub latent_ln: LayerNormParams,
    /// `z -> X̄`.
    pub decoder: Mlp,
}

impl LvraeModel {
    /// Builds an encoder `[n + d_u, enc_hidden..., d_u]` and a decoder
    /// `[d_u, dec_hidden..., n]` around the base map `phi`.
    pub fn new(phi: &BaseMap, enc_hidden: &[usize], dec_hidden: &[usize], rng: &mut RngState) -> Result<Self> {
        let (n, d_u) = (phi.signal_dim(), phi.feature_dim());
        let mut dims = Vec::with_capacity(enc_hidden.len() + 2);
        dims.push(n + d_u);
        dims.extend_from_slice(enc_hidden);
        dims.push(d_u);
        let mut encoder = Mlp::new(&dims, rng)?;
        encoder.zero_output_layer();
        let mut dims = Vec::with_capacity(dec_hidden.len() + 2);
        dims.push(d_u);
        dims.extend_from_slice(dec_hidden);
        dims.push(n);
        let decoder = Mlp::new(&dims, rng)?;
        Ok(Self {
            encoder,
            latent_ln: phi.ln().clone(),
            decoder,
        })
    }

    pub fn from_parts(encoder: Mlp, latent_ln: LayerNormParams, decoder: Mlp) -> Result<Self> {
        let d_u = latent_ln.dim();
        if encoder.output_dim() != d_u {
            return Err(Error::dim("LvraeModel::from_parts", d_u, encoder.output_dim()));
        }
        if decoder.input_dim() != d_u {
            return Err(Error::dim("LvraeModel::from_parts", d_u, decoder.input_dim()));
        }
        if encoder.input_dim() != decoder.output_dim() + d_u {
            return Err(Error::dim(
                "LvraeModel::from_parts",
                decoder.output_dim() + d_u,
                encoder.input_dim(),
            ));
        }
        Ok(Self {
            encoder,
            latent_ln,
            decoder,
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_ln.dim()
    }

    pub fn signal_dim(&self) -> usize {
        self.decoder.output_dim()
    }

    /// `r = encoder([X | u])` row-wise.
    pub fn encode_residual_rows(&self, x: &Mat, u: &Mat) -> Result<Mat> {
        if x.rows() != u.rows() {
            return Err(Error::dim("encode_residual", x.rows(), u.rows()));
        }
        if u.cols() != self.latent_dim() {
            return Err(Error::dim("encode_residual", self.latent_dim(), u.cols()));
        }
        self.encoder.predict(&x.hcat(u)?)
    }

    /// `z = layer_norm(r + u)` row-wise.
    pub fn make_latent_rows(&self, r: &Mat, u: &Mat) -> Result<Mat> {
        layer_norm_rows(&r.add(u)?, &self.latent_ln)
    }

    /// Latents of a batch of signals.
    pub fn encode_rows(&self, phi: &BaseMap, x: &Mat) -> Result<Mat> {
        let u = phi.features_rows(x)?;
        let r = self.encode_residual_rows(x, &u)?;
        self.make_latent_rows(&r, &u)
    }

    pub fn reconstruct_rows(&self, z: &Mat) -> Result<Mat> {
        self.decoder.predict(z)
    }
}

pub fn encode_residual(m: &LvraeModel, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    Ok(m.encode_residual_rows(&Mat::row_vector(x), &Mat::row_vector(u))?.into_vec())
}

pub fn make_latent(m: &LvraeModel, r: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    if r.len() != u.len() {
        return Err(Error::dim("make_latent", u.len(), r.len()));
    }
    let s: Vec<f64> = r.iter().zip(u).map(|(a, b)| a + b).collect();
    layer_norm(&s, &m.latent_ln)
}

pub fn reconstruct(m: &LvraeModel, z: &[f64]) -> Result<Vec<f64>> {
    Ok(m.reconstruct_rows(&Mat::row_vector(z))?.into_vec())
}

/// `reconstruct(z0 + σ̄ ε)` row-wise.
pub fn decode_generated(m: &LvraeModel, z0: &Mat, sigma_bar: f64, rng: &mut RngState) -> Result<Mat> {
    if !(sigma_bar >= 0.0) {
        return Err(Error::InvalidArgument("sigma_bar must be non-negative"));
    }
    if sigma_bar == 0.0 {
        return m.reconstruct_rows(z0);
    }
    let mut z = z0.clone();
    z.add_scaled(&gaussian(rng, z0.rows(), z0.cols()), sigma_bar)?;
    m.reconstruct_rows(&z)
}
