use alloc::vec::Vec;

use crate::numerics::{gaussian, Mat, RngState};
use crate::{Error, Result};

/// One affine layer, `y = x W + b` with `W` stored `in x out`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Linear {
    pub weight: Mat,
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// Fully connected network: ReLU after every hidden layer, identity output.
///
/// Any mutable access to the parameters bumps an internal version, and a
/// [`ForwardCache`] taken before the bump is refused by [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<Linear>,
    version: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

/// Activations kept by [`Mlp::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input of every layer; `inputs[0]` is the network input.
    inputs: Vec<Mat>,
    /// Pre-activations of hidden layers.
    pre: Vec<Mat>,
    version: u64,
    dims: Vec<usize>,
}

/// Parameter gradients laid out like [`Mlp`] layers.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub layers: Vec<Linear>,
}

impl MlpGrads {
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            out.push(l.weight.as_slice());
            out.push(l.bias.as_slice());
        }
        out
    }

    /// `self += s * other`; both must come from the same network shape.
    pub fn add_scaled(&mut self, other: &MlpGrads, s: f64) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::dim("MlpGrads::add_scaled", self.layers.len(), other.layers.len()));
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weight.add_scaled(&b.weight, s)?;
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += s * y;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            l.weight.as_mut_slice().iter_mut().for_each(|x| *x *= s);
            l.bias.iter_mut().for_each(|x| *x *= s);
        }
    }

    /// Flattened weights and bias of the output layer.
    pub fn output_layer_flat(&self) -> Vec<f64> {
        let last = self.layers.last().expect("network has at least one layer");
        let mut v = last.weight.as_slice().to_vec();
        v.extend_from_slice(&last.bias);
        v
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|x| x.is_finite()))
    }
}

impl Mlp {
    /// He-normal weights, zero biases. `dims` lists every layer width including
    /// input and output, so `dims.len() - 1` affine layers are built.
    pub fn new(dims: &[usize], rng: &mut RngState) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidArgument("an MLP needs at least input and output widths"));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument("MLP layer widths must be positive"));
        }
        let layers = dims
            .windows(2)
            .map(|w| {
                let std = libm::sqrt(2.0 / w[0] as f64);
                Linear {
                    weight: gaussian(rng, w[0], w[1]).scale(std),
                    bias: alloc::vec![0.0; w[1]],
                }
            })
            .collect();
        Ok(Self { layers, version: 0 })
    }

    pub fn from_layers(layers: Vec<Linear>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("an MLP needs at least one layer"));
        }
        for l in &layers {
            if l.bias.len() != l.out_dim() {
                return Err(Error::dim("Mlp::from_layers", l.out_dim(), l.bias.len()));
            }
        }
        for w in layers.windows(2) {
            if w[0].out_dim() != w[1].in_dim() {
                return Err(Error::dim("Mlp::from_layers", w[0].out_dim(), w[1].in_dim()));
            }
        }
        Ok(Self { layers, version: 0 })
    }

    pub fn layers(&self) -> &[Linear] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Linear] {
        self.version += 1;
        &mut self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = Vec::with_capacity(self.layers.len() + 1);
        d.push(self.input_dim());
        d.extend(self.layers.iter().map(Linear::out_dim));
        d
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weight.as_slice().len() + l.bias.len()).sum()
    }

    /// Sets the output layer's weights and biases to exactly zero.
    pub fn zero_output_layer(&mut self) {
        let last = self.layers_mut().last_mut().expect("non-empty");
        last.weight.as_mut_slice().iter_mut().for_each(|x| *x = 0.0);
        last.bias.iter_mut().for_each(|x| *x = 0.0);
    }

    /// Mutable parameter slices in layer order: weight then bias.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.version += 1;
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &mut self.layers {
            out.push(l.weight.as_mut_slice());
            out.push(l.bias.as_mut_slice());
        }
        out
    }

    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            out.push(l.weight.as_slice());
            out.push(l.bias.as_slice());
        }
        out
    }

    fn check_input(&self, input: &Mat) -> Result<()> {
        if input.cols() != self.input_dim() {
            return Err(Error::dim("Mlp::forward", self.input_dim(), input.cols()));
        }
        Ok(())
    }

    fn affine(layer: &Linear, x: &Mat) -> Mat {
        let mut y = x.matmul(&layer.weight).expect("checked widths");
        y.add_row_broadcast(&layer.bias).expect("checked widths");
        y
    }

    /// Output without keeping activations.
    pub fn predict(&self, input: &Mat) -> Result<Mat> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut a = Self::affine(&self.layers[0], input);
        for l in 1..=last {
            relu_in_place(&mut a);
            a = Self::affine(&self.layers[l], &a);
        }
        Ok(a)
    }

    pub fn forward(&self, input: &Mat) -> Result<(Mat, ForwardCache)> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(last);
        let mut a = input.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            let z = Self::affine(layer, &a);
            inputs.push(a);
            if l == last {
                a = z;
            } else {
                let mut h = z.clone();
                relu_in_place(&mut h);
                pre.push(z);
                a = h;
            }
        }
        let cache = ForwardCache {
            inputs,
            pre,
            version: self.version,
            dims: self.dims(),
        };
        Ok((a, cache))
    }

    /// Gradients of a scalar loss whose gradient at the output is `upstream`.
    /// Returns parameter gradients and the gradient at the input.
    pub fn backward(&self, cache: &ForwardCache, upstream: &Mat) -> Result<(MlpGrads, Mat)> {
        if cache.version != self.version || cache.dims != self.dims() {
            return Err(Error::StaleCache);
        }
        let batch = cache.inputs[0].rows();
        if upstream.rows() != batch {
            return Err(Error::dim("Mlp::backward", batch, upstream.rows()));
        }
        if upstream.cols() != self.output_dim() {
            return Err(Error::dim("Mlp::backward", self.output_dim(), upstream.cols()));
        }
        let n = self.layers.len();
        let mut grads: Vec<Option<Linear>> = alloc::vec![None; n];
        let mut g = upstream.clone();
        for l in (0..n).rev() {
            if l < n - 1 {
                // ReLU subgradient at 0 is 0
                for (gi, &zi) in g.as_mut_slice().iter_mut().zip(cache.pre[l].as_slice()) {
                    if zi <= 0.0 {
                        *gi = 0.0;
                    }
                }
            }
            let weight = cache.inputs[l].t_matmul(&g)?;
            let bias = g.column_sums();
            let next = g.matmul_t(&self.layers[l].weight)?;
            grads[l] = Some(Linear { weight, bias });
            g = next;
        }
        Ok((
            MlpGrads {
                layers: grads.into_iter().map(|x| x.expect("filled")).collect(),
            },
            g,
        ))
    }
}

fn relu_in_place(m: &mut Mat) {
    for x in m.as_mut_slice() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}
