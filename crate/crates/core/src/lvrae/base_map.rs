use alloc::vec::Vec;

use super::signal::{FourierBasis, SignalSpec};
use crate::numerics::{gaussian, orthonormal_columns, LayerNormParams, Mat, RngState};
use crate::{Error, Result};

/// Frozen semantic feature map `u = A · lowpass(X)`.
///
/// `lowpass` holds the Fourier rows of frequencies `0..=k_low`; `A` maps those
/// coefficients to `d_u` features. `A` is a Gaussian draw made orthogonal to
/// the all-ones feature direction, orthonormalized, and scaled so that clean
/// base signals map to features with zero mean and standard deviation
/// `feature_std`. The stored `ln` has gain `feature_std` and zero bias, so
/// `layer_norm(u, ln) ≈ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMap {
    lowpass: Mat,
    a: Mat,
    ln: LayerNormParams,
}

impl BaseMap {
    /// Unit-variance features.
    pub fn new(spec: &SignalSpec, d_u: usize, rng: &mut RngState) -> Result<Self> {
        Self::with_feature_std(spec, d_u, 1.0, rng)
    }

    pub fn with_feature_std(spec: &SignalSpec, d_u: usize, feature_std: f64, rng: &mut RngState) -> Result<Self> {
        spec.validate()?;
        if !(feature_std > 0.0 && feature_std.is_finite()) {
            return Err(Error::InvalidArgument("feature_std must be positive and finite"));
        }
        let basis = FourierBasis::new(spec.n)?;
        let rows = basis.band_rows(0, spec.k_low);
        let m = rows.len();
        if d_u < m + 1 {
            return Err(Error::InvalidArgument("feature dimension must exceed the low-band size"));
        }
        let mut lowpass = Mat::zeros(m, spec.n);
        for (i, &b) in rows.iter().enumerate() {
            lowpass.row_mut(i).copy_from_slice(basis.matrix().row(b));
        }
        // first column of `g` is the ones direction; orthonormalizing keeps the
        // remaining columns orthogonal to it
        let mut g = gaussian(rng, d_u, m + 1);
        for i in 0..d_u {
            g.row_mut(i)[0] = 1.0;
        }
        let q = orthonormal_columns(&g)?.columns(1, m + 1);
        let scale = feature_std * libm::sqrt(d_u as f64) / spec.base_norm();
        Ok(Self {
            lowpass,
            a: q.scale(scale),
            ln: LayerNormParams::new(alloc::vec![feature_std; d_u], alloc::vec![0.0; d_u], crate::numerics::DEFAULT_LN_EPS)?,
        })
    }

    pub fn from_parts(lowpass: Mat, a: Mat, ln: LayerNormParams) -> Result<Self> {
        if a.cols() != lowpass.rows() {
            return Err(Error::dim("BaseMap::from_parts", lowpass.rows(), a.cols()));
        }
        if ln.dim() != a.rows() {
            return Err(Error::dim("BaseMap::from_parts", a.rows(), ln.dim()));
        }
        Ok(Self { lowpass, a, ln })
    }

    pub fn lowpass(&self) -> &Mat {
        &self.lowpass
    }

    pub fn mixing(&self) -> &Mat {
        &self.a
    }

    pub fn ln(&self) -> &LayerNormParams {
        &self.ln
    }

    pub fn signal_dim(&self) -> usize {
        self.lowpass.cols()
    }

    pub fn feature_dim(&self) -> usize {
        self.a.rows()
    }

    /// Semantic features of one signal.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.features_rows(&Mat::row_vector(x))?.into_vec())
    }

    /// Row-wise features, `batch x d_u`.
    pub fn features_rows(&self, x: &Mat) -> Result<Mat> {
        if x.cols() != self.signal_dim() {
            return Err(Error::dim("base_features", self.signal_dim(), x.cols()));
        }
        x.matmul_t(&self.lowpass)?.matmul_t(&self.a)
    }
}

/// `u = A · lowpass(X)` for one signal.
pub fn base_features(phi: &BaseMap, x: &[f64]) -> Result<Vec<f64>> {
    phi.features(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lvrae::signal::SignalSource;
    use crate::numerics::layer_norm;

    fn setup() -> (SignalSource, BaseMap) {
        let spec = SignalSpec::default();
        let phi = BaseMap::new(&spec, 32, &mut RngState::new(3)).unwrap();
        (SignalSource::new(spec).unwrap(), phi)
    }

    #[test]
    fn zero_signal_has_zero_features() {
        let (_, phi) = setup();
        assert!(base_features(&phi, &[0.0; 64]).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn features_ignore_high_band() {
        let (src, phi) = setup();
        let mut rng = RngState::new(4);
        let s = src.sample(&mut rng);
        let u = base_features(&phi, &s.x).unwrap();
        let hi = src.basis().band_rows(5, 32);
        let mut x2 = s.x.clone();
        for &b in &hi {
            crate::numerics::axpy(rng.normal(), src.basis().matrix().row(b), &mut x2);
        }
        let u2 = base_features(&phi, &x2).unwrap();
        for (a, b) in u.iter().zip(&u2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn clean_features_are_already_normalized() {
        let (src, phi) = setup();
        let s = src.sample(&mut RngState::new(8));
        let u = base_features(&phi, &s.x).unwrap();
        let mean = u.iter().sum::<f64>() / 32.0;
        let var = u.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 32.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-10, "{mean} {var}");
        let z = layer_norm(&u, phi.ln()).unwrap();
        for (a, b) in u.iter().zip(&z) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let (_, phi) = setup();
        assert!(base_features(&phi, &[0.0; 10]).is_err());
        assert!(BaseMap::new(&SignalSpec::default(), 8, &mut RngState::new(1)).is_err());
        assert!(BaseMap::from_parts(Mat::zeros(9, 64), Mat::zeros(32, 8), LayerNormParams::identity(32)).is_err());
    }
}
