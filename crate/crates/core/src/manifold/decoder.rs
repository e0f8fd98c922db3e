use crate::numerics::{gaussian, orthonormal_frame, Mat, RngState};
use crate::{Error, Result};

/// Isometric embedding `x̂ ↦ P x̂` of the plane into `R^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    p: Mat,
}

impl Embedding {
    pub fn new(p: Mat) -> Result<Self> {
        if p.cols() != 2 {
            return Err(Error::dim("Embedding::new", 2, p.cols()));
        }
        let gram = p.t_matmul(&p)?.sub(&Mat::identity(2))?;
        if gram.max_abs() > 1e-10 {
            return Err(Error::InvalidArgument("embedding columns are not orthonormal"));
        }
        Ok(Self { p })
    }

    pub fn matrix(&self) -> &Mat {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// Row-wise `z = P x̂`, i.e. `Z = X̂ Pᵀ`.
    pub fn embed(&self, xhat: &Mat) -> Result<Mat> {
        if xhat.cols() != 2 {
            return Err(Error::dim("Embedding::embed", 2, xhat.cols()));
        }
        xhat.matmul_t(&self.p)
    }

    /// Row-wise `Pᵀ z`.
    pub fn project(&self, z: &Mat) -> Result<Mat> {
        z.matmul(&self.p)
    }
}

/// Analytic decoder `D(z) = Pᵀz + α sin(β Uᵀz)ᵀ W`.
///
/// `P` spans the data plane, `U` its orthogonal complement and `W` is a frozen
/// `(D - 2) x 2` Gaussian read-out with variance `1 / (D - 2)`. At `D = 2` the
/// complement is empty and the decoder is the plain projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyDecoder {
    p: Mat,
    u: Mat,
    w: Mat,
    pub alpha: f64,
    pub beta: f64,
}

impl ToyDecoder {
    pub fn new(rng: &mut RngState, dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::dim("ToyDecoder::new", 2, dim));
        }
        let (p, u) = orthonormal_frame(rng, dim, 2)?;
        let off = dim - 2;
        let w = if off == 0 {
            Mat::zeros(0, 2)
        } else {
            gaussian(rng, off, 2).scale(libm::sqrt(1.0 / off as f64))
        };
        Ok(Self {
            p,
            u,
            w,
            alpha,
            beta,
        })
    }

    pub fn from_parts(p: Mat, u: Mat, w: Mat, alpha: f64, beta: f64) -> Result<Self> {
        let dim = p.rows();
        if p.cols() != 2 {
            return Err(Error::dim("ToyDecoder::from_parts", 2, p.cols()));
        }
        if u.shape() != (dim, dim - 2) {
            return Err(Error::dim("ToyDecoder::from_parts", dim - 2, u.cols()));
        }
        if w.shape() != (dim - 2, 2) {
            return Err(Error::dim("ToyDecoder::from_parts", dim - 2, w.rows()));
        }
        Ok(Self {
            p,
            u,
            w,
            alpha,
            beta,
        })
    }

    /// Same frame and read-out, different off-manifold gain.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn p(&self) -> &Mat {
        &self.p
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn w(&self) -> &Mat {
        &self.w
    }

    pub fn embedding(&self) -> Embedding {
        Embedding { p: self.p.clone() }
    }

    fn check(&self, len: usize, op: &'static str) -> Result<()> {
        if len != self.dim() {
            return Err(Error::dim(op, self.dim(), len));
        }
        Ok(())
    }

    pub fn decode(&self, z: &[f64]) -> Result<[f64; 2]> {
        self.check(z.len(), "ToyDecoder::decode")?;
        let out = self.decode_rows(&Mat::row_vector(z))?;
        Ok([out[(0, 0)], out[(0, 1)]])
    }

    /// Row-wise decode of an `n x D` batch.
    pub fn decode_rows(&self, z: &Mat) -> Result<Mat> {
        self.check(z.cols(), "ToyDecoder::decode_rows")?;
        let mut out = z.matmul(&self.p)?;
        if self.u.cols() > 0 && self.alpha != 0.0 {
            let beta = self.beta;
            let s = z.matmul(&self.u)?.map(|x| libm::sin(beta * x));
            out.add_scaled(&s.matmul(&self.w)?, self.alpha)?;
        }
        Ok(out)
    }

    /// `J = Pᵀ + αβ Wᵀ Diag(cos(β Uᵀz)) Uᵀ`, a `2 x D` matrix.
    pub fn jacobian(&self, z: &[f64]) -> Result<Mat> {
        self.check(z.len(), "ToyDecoder::jacobian")?;
        let mut j = self.p.transpose();
        let off = self.u.cols();
        if off == 0 {
            return Ok(j);
        }
        let proj = Mat::row_vector(z).matmul(&self.u)?;
        let c = self.alpha * self.beta;
        // (Wᵀ Diag(cos) Uᵀ)_{a,i} = Σ_k W_{k,a} cos_k U_{i,k}
        for k in 0..off {
            let gate = c * libm::cos(self.beta * proj[(0, k)]);
            if gate == 0.0 {
                continue;
            }
            for a in 0..2 {
                let wa = gate * self.w[(k, a)];
                for i in 0..self.dim() {
                    j[(a, i)] += wa * self.u[(i, k)];
                }
            }
        }
        Ok(j)
    }

    /// `(‖J P‖_F, ‖J U‖_F)`: response along and across the data plane.
    ///
    /// With `PᵀU = 0` and `UᵀU = I`, `J U = αβ Wᵀ Diag(cos(β Uᵀz))`, which is
    /// evaluated directly so the off-plane gain is exactly zero at `α = 0` and
    /// exactly linear in `α`.
    pub fn off_manifold_gain(&self, z: &[f64]) -> Result<(f64, f64)> {
        let j = self.jacobian(z)?;
        let on = j.matmul(&self.p)?.frobenius_norm();
        let proj = Mat::row_vector(z).matmul(&self.u)?;
        let mut sq = 0.0;
        for k in 0..self.u.cols() {
            let c = libm::cos(self.beta * proj[(0, k)]);
            sq += c * c * (self.w[(k, 0)] * self.w[(k, 0)] + self.w[(k, 1)] * self.w[(k, 1)]);
        }
        let off = (self.alpha * self.beta).abs() * libm::sqrt(sq);
        Ok((on, off))
    }
}
