//! Flow matching on the linear path `x_t = (1 - t) x0 + t ε` and probability-flow
//! ODE sampling with the time-shift schedule.
//!
//! Time runs from 0 (data) to 1 (noise). Training draws `t ~ U(0, 1)`, maps it
//! through the shift `t' = a t / (1 + (a - 1) t)`, interpolates at `t'`, and
//! feeds `t'` to the model. Sampling walks a uniform grid from 1 to 0, mapped
//! through the same shift, with explicit Euler steps of size `Δt'`.

use alloc::vec::Vec;

use crate::net::{cosine_lr, AdamConfig, AdamState, FourierTimeEmbed, Mlp, MlpGrads, DEFAULT_EMBED_FREQUENCIES};
use crate::numerics::{gaussian, Mat, RngState};
use crate::{Error, Result};

/// The linear (rectified-flow) path, `α_t = 1 - t` and `β_t = t`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinearPath;

impl LinearPath {
    pub fn alpha(&self, t: f64) -> f64 {
        1.0 - t
    }

    pub fn beta(&self, t: f64) -> f64 {
        t
    }

    /// Row-wise `(x_t, ẋ_t)` with one time per row.
    pub fn interpolate(&self, x0: &Mat, eps: &Mat, t: &[f64]) -> Result<(Mat, Mat)> {
        if x0.shape() != eps.shape() {
            return Err(Error::dim("LinearPath::interpolate", x0.cols(), eps.cols()));
        }
        if t.len() != x0.rows() {
            return Err(Error::dim("LinearPath::interpolate", x0.rows(), t.len()));
        }
        if t.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidArgument("interpolation time outside [0, 1]"));
        }
        let mut xt = Mat::zeros(x0.rows(), x0.cols());
        let mut xdot = Mat::zeros(x0.rows(), x0.cols());
        for i in 0..x0.rows() {
            let (a, b) = (self.alpha(t[i]), self.beta(t[i]));
            let (r0, re) = (x0.row(i), eps.row(i));
            for (j, out) in xt.row_mut(i).iter_mut().enumerate() {
                *out = a * r0[j] + b * re[j];
            }
            for (j, out) in xdot.row_mut(i).iter_mut().enumerate() {
                *out = re[j] - r0[j];
            }
        }
        Ok((xt, xdot))
    }
}

/// `a = sqrt(c h w / 4096)` for a latent of `c` channels on an `h x w` grid.
pub fn shift_coefficient(c: usize, h: usize, w: usize) -> f64 {
    libm::sqrt((c * h * w) as f64 / 4096.0)
}

/// Time shift `t' = a t / (1 + (a - 1) t)` with `a >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftSchedule {
    a: f64,
}

impl Default for ShiftSchedule {
    fn default() -> Self {
        Self::identity()
    }
}

impl ShiftSchedule {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 1.0) {
            return Err(Error::InvalidArgument("shift coefficient must be finite and >= 1"));
        }
        Ok(Self { a })
    }

    pub fn identity() -> Self {
        Self { a: 1.0 }
    }

    /// Schedule for a latent of shape `(c, h, w)`, clamped below at `a = 1`.
    pub fn for_latent(c: usize, h: usize, w: usize) -> Self {
        Self {
            a: shift_coefficient(c, h, w).max(1.0),
        }
    }

    pub fn coefficient(&self) -> f64 {
        self.a
    }

    pub fn shift(&self, t: f64) -> f64 {
        self.a * t / (1.0 + (self.a - 1.0) * t)
    }
}

/// One flow-matching minibatch; `t` holds the unshifted times.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainBatch {
    pub x0: Mat,
    pub eps: Mat,
    pub t: Vec<f64>,
}

impl TrainBatch {
    pub fn new(x0: Mat, eps: Mat, t: Vec<f64>) -> Result<Self> {
        if x0.shape() != eps.shape() {
            return Err(Error::dim("TrainBatch::new", x0.rows(), eps.rows()));
        }
        if t.len() != x0.rows() {
            return Err(Error::dim("TrainBatch::new", x0.rows(), t.len()));
        }
        Ok(Self { x0, eps, t })
    }

    /// Pairs `x0` with fresh `ε ~ N(0, I)` and `t ~ U(0, 1)`.
    pub fn draw(x0: Mat, rng: &mut RngState) -> Self {
        let eps = gaussian(rng, x0.rows(), x0.cols());
        let t = (0..x0.rows()).map(|_| rng.uniform()).collect();
        Self { x0, eps, t }
    }
}

/// A time-dependent vector field evaluated row-wise.
pub trait VelocityField {
    fn dim(&self) -> usize;
    fn velocity(&self, x: &Mat, t: f64) -> Result<Mat>;
}

impl<F: Fn(&Mat, f64) -> Mat> VelocityField for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }

    fn velocity(&self, x: &Mat, t: f64) -> Result<Mat> {
        Ok((self.1)(x, t))
    }
}

/// MLP velocity `v_θ([x | embed(t')])`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityModel {
    pub net: Mlp,
    pub embed: FourierTimeEmbed,
}

impl VelocityModel {
    /// Network widths are `[dim + embed_dim, hidden..., dim]`.
    pub fn new(dim: usize, hidden: &[usize], rng: &mut RngState) -> Result<Self> {
        let embed = FourierTimeEmbed::new(rng, DEFAULT_EMBED_FREQUENCIES, 1.0);
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(dim + embed.dim());
        dims.extend_from_slice(hidden);
        dims.push(dim);
        let net = Mlp::new(&dims, rng)?;
        Ok(Self { net, embed })
    }

    pub fn data_dim(&self) -> usize {
        self.net.output_dim()
    }

    fn input(&self, x: &Mat, times: &[f64]) -> Result<Mat> {
        if x.cols() + self.embed.dim() != self.net.input_dim() {
            return Err(Error::dim(
                "VelocityModel::input",
                self.net.input_dim() - self.embed.dim(),
                x.cols(),
            ));
        }
        x.hcat(&self.embed.embed_rows(times))
    }
}

impl VelocityField for VelocityModel {
    fn dim(&self) -> usize {
        self.data_dim()
    }

    fn velocity(&self, x: &Mat, t: f64) -> Result<Mat> {
        let times = alloc::vec![t; x.rows()];
        self.net.predict(&self.input(x, &times)?)
    }
}

/// Batch mean of `‖v_θ(x_t', t') - ẋ_t'‖²` and its parameter gradient.
pub fn fm_loss(
    model: &VelocityModel,
    batch: &TrainBatch,
    shift: &ShiftSchedule,
) -> Result<(f64, MlpGrads)> {
    if batch.x0.cols() != model.data_dim() {
        return Err(Error::dim("fm_loss", model.data_dim(), batch.x0.cols()));
    }
    let shifted: Vec<f64> = batch.t.iter().map(|&t| shift.shift(t)).collect();
    let (xt, xdot) = LinearPath.interpolate(&batch.x0, &batch.eps, &shifted)?;
    let (out, cache) = model.net.forward(&model.input(&xt, &shifted)?)?;
    let diff = out.sub(&xdot)?;
    let b = batch.x0.rows() as f64;
    let loss = diff.as_slice().iter().map(|d| d * d).sum::<f64>() / b;
    let (grads, _) = model.net.backward(&cache, &diff.scale(2.0 / b))?;
    Ok((loss, grads))
}

/// Integrates `dX = v(X, t') dt'` from `t = 1` (`X ~ N(0, I)`) down to `t = 0`.
pub fn euler_sample(
    field: &impl VelocityField,
    n_samples: usize,
    steps: usize,
    shift: &ShiftSchedule,
    rng: &mut RngState,
) -> Result<Mat> {
    if steps == 0 {
        return Err(Error::InvalidArgument("euler_sample needs at least one step"));
    }
    let mut x = gaussian(rng, n_samples, field.dim());
    for i in 0..steps {
        let t = 1.0 - i as f64 / steps as f64;
        let t_next = 1.0 - (i + 1) as f64 / steps as f64;
        let (s, s_next) = (shift.shift(t), shift.shift(t_next));
        let v = field.velocity(&x, s)?;
        x.add_scaled(&v, s_next - s)?;
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FlowTrainConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Shift coefficient `a`; 1 disables shifting.
    pub shift: f64,
    /// Anneal the learning rate to zero over `steps` with a cosine schedule.
    pub cosine_decay: bool,
}

impl Default for FlowTrainConfig {
    fn default() -> Self {
        Self {
            steps: 5000,
            batch_size: 128,
            lr: 1e-3,
            shift: 1.0,
            cosine_decay: true,
        }
    }
}

/// Trains `model` with Adam on batches drawn from `sample_data(rng, batch)`.
/// Returns the per-step loss trace.
pub fn train_flow(
    model: &mut VelocityModel,
    mut sample_data: impl FnMut(&mut RngState, usize) -> Mat,
    config: &FlowTrainConfig,
    rng: &mut RngState,
) -> Result<Vec<f64>> {
    let shift = ShiftSchedule::new(config.shift)?;
    let mut adam = AdamState::new(AdamConfig::with_lr(config.lr));
    let mut trace = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        if config.cosine_decay {
            adam.config.lr = cosine_lr(config.lr, step, config.steps);
        }
        let x0 = sample_data(rng, config.batch_size);
        let batch = TrainBatch::draw(x0, rng);
        let (loss, grads) = fm_loss(model, &batch, &shift)?;
        if !loss.is_finite() || !grads.is_finite() {
            return Err(Error::NonFinite {
                what: "flow-matching loss",
                step,
            });
        }
        adam.step(&mut model.net.param_slices_mut(), &grads.slices())?;
        trace.push(loss);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn interpolation_boundaries() {
        let x0 = Mat::from_vec(1, 2, vec![1.0, 2.0]).unwrap();
        let eps = Mat::from_vec(1, 2, vec![-3.0, 0.5]).unwrap();
        let (xt, xd) = LinearPath.interpolate(&x0, &eps, &[0.0]).unwrap();
        assert_eq!(xt, x0);
        assert_eq!(xd, eps.sub(&x0).unwrap());
        let (xt, _) = LinearPath.interpolate(&x0, &eps, &[1.0]).unwrap();
        assert_eq!(xt, eps);
    }

    #[test]
    fn interpolation_midpoint() {
        let x0 = Mat::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        let eps = Mat::from_vec(1, 2, vec![0.0, 1.0]).unwrap();
        let (xt, _) = LinearPath.interpolate(&x0, &eps, &[0.5]).unwrap();
        assert_eq!(xt.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn interpolation_errors() {
        let x0 = Mat::zeros(2, 2);
        assert!(LinearPath.interpolate(&x0, &Mat::zeros(2, 3), &[0.1, 0.2]).is_err());
        assert!(LinearPath.interpolate(&x0, &Mat::zeros(2, 2), &[0.1]).is_err());
        assert!(LinearPath.interpolate(&x0, &Mat::zeros(2, 2), &[0.1, 1.5]).is_err());
    }

    #[test]
    fn path_coefficients_hit_boundaries_exactly() {
        let p = LinearPath;
        assert_eq!((p.alpha(0.0), p.beta(1.0), p.alpha(1.0), p.beta(0.0)), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn shift_endpoints_and_identity() {
        for a in [1.0, 2.0, 6.93, 40.0] {
            let s = ShiftSchedule::new(a).unwrap();
            assert_eq!(s.shift(0.0), 0.0);
            assert_eq!(s.shift(1.0), 1.0);
        }
        let id = ShiftSchedule::identity();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert_eq!(id.shift(t), t);
        }
        assert!(ShiftSchedule::new(0.5).is_err());
        assert!(ShiftSchedule::new(f64::NAN).is_err());
    }

    #[test]
    fn shift_value_at_half() {
        // 6.93 * 0.5 / (1 + 5.93 * 0.5) = 3.465 / 3.965
        let s = ShiftSchedule::new(6.93).unwrap();
        assert!((s.shift(0.5) - 0.8739).abs() < 1e-4);
    }

    #[test]
    fn shift_is_strictly_increasing() {
        for a in [1.0, 2.0, 6.93] {
            let s = ShiftSchedule::new(a).unwrap();
            let mut prev = s.shift(0.0);
            for k in 1..=1000 {
                let cur = s.shift(k as f64 / 1000.0);
                assert!(cur > prev);
                prev = cur;
            }
        }
    }

    #[test]
    fn shift_coefficients() {
        assert!((shift_coefficient(768, 16, 16) - 6.9282).abs() < 1e-4);
        assert_eq!(shift_coefficient(4096, 1, 1), 1.0);
        assert_eq!(shift_coefficient(16384, 1, 1), 2.0);
        assert_eq!(ShiftSchedule::for_latent(32, 1, 1).coefficient(), 1.0);
    }

    #[test]
    fn zero_drift_returns_initial_noise() {
        let zero = (3usize, |x: &Mat, _t: f64| Mat::zeros(x.rows(), x.cols()));
        let out = euler_sample(&zero, 5, 1, &ShiftSchedule::identity(), &mut RngState::new(4)).unwrap();
        assert_eq!(out, gaussian(&mut RngState::new(4), 5, 3));
    }

    #[test]
    fn point_mass_velocity_lands_on_target() {
        let target = [0.7, -1.3];
        let field = (2usize, move |x: &Mat, t: f64| {
            Mat::from_fn(x.rows(), 2, |i, j| (x[(i, j)] - target[j]) / t)
        });
        for steps in [1, 10, 100] {
            let out = euler_sample(&field, 50, steps, &ShiftSchedule::identity(), &mut RngState::new(5)).unwrap();
            for row in out.row_iter() {
                assert!((row[0] - target[0]).abs() < 1e-9);
                assert!((row[1] - target[1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let model = VelocityModel::new(2, &[8], &mut RngState::new(6)).unwrap();
        let s = ShiftSchedule::new(2.0).unwrap();
        let a = euler_sample(&model, 10, 7, &s, &mut RngState::new(1)).unwrap();
        let b = euler_sample(&model, 10, 7, &s, &mut RngState::new(1)).unwrap();
        assert_eq!(a, b);
        assert!(euler_sample(&model, 10, 0, &s, &mut RngState::new(1)).is_err());
    }

    #[test]
    fn zero_model_loss_is_mean_squared_target() {
        let mut model = VelocityModel::new(2, &[4], &mut RngState::new(7)).unwrap();
        model.net.param_slices_mut().into_iter().for_each(|s| s.fill(0.0));
        let mut rng = RngState::new(8);
        let batch = TrainBatch::draw(gaussian(&mut rng, 6, 2), &mut rng);
        let (loss, _) = fm_loss(&model, &batch, &ShiftSchedule::identity()).unwrap();
        let xdot = batch.eps.sub(&batch.x0).unwrap();
        let want = xdot.as_slice().iter().map(|x| x * x).sum::<f64>() / 6.0;
        assert!((loss - want).abs() < 1e-12);
    }

    #[test]
    fn zero_steps_leave_model_unchanged() {
        let mut model = VelocityModel::new(2, &[4], &mut RngState::new(9)).unwrap();
        let before = model.clone();
        let cfg = FlowTrainConfig {
            steps: 0,
            ..FlowTrainConfig::default()
        };
        let trace = train_flow(&mut model, |r, n| gaussian(r, n, 2), &cfg, &mut RngState::new(1)).unwrap();
        assert!(trace.is_empty());
        assert_eq!(model, before);
    }

    #[test]
    fn divergence_is_reported() {
        let mut model = VelocityModel::new(2, &[4], &mut RngState::new(9)).unwrap();
        let cfg = FlowTrainConfig {
            steps: 3,
            batch_size: 4,
            ..FlowTrainConfig::default()
        };
        let err = train_flow(&mut model, |_, n| Mat::from_fn(n, 2, |_, _| f64::NAN), &cfg, &mut RngState::new(1));
        assert_eq!(
            err.unwrap_err(),
            Error::NonFinite {
                what: "flow-matching loss",
                step: 0
            }
        );
    }
}
