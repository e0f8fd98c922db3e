use alloc::vec::Vec;

use super::mat::{axpy, dot, norm};
use super::{gaussian, Mat, RngState};
use crate::{Error, Result};

/// Random orthonormal frame `(P, U)` of `R^dim`.
///
/// `P` is `dim x d` and `U` is `dim x (dim - d)`; together their columns form
/// an orthonormal basis. The basis comes from modified Gram-Schmidt with one
/// re-orthogonalization pass applied to the columns of a `dim x dim` Gaussian
/// matrix. `d == dim` is allowed and yields an empty `U`.
pub fn orthonormal_frame(rng: &mut RngState, dim: usize, d: usize) -> Result<(Mat, Mat)> {
    if d == 0 || d > dim {
        return Err(Error::dim("orthonormal_frame", dim, d));
    }
    let basis = orthonormal_columns(&gaussian(rng, dim, dim))?;
    Ok((basis.columns(0, d), basis.columns(d, dim)))
}

/// Orthonormalizes the columns of `a` (twice-applied modified Gram-Schmidt).
///
/// Fails with [`Error::Degenerate`] if a column is numerically dependent on
/// the previous ones.
pub fn orthonormal_columns(a: &Mat) -> Result<Mat> {
    let (rows, cols) = a.shape();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = a.column(j);
        let original = norm(&v);
        for _pass in 0..2 {
            for qk in &q {
                let c = dot(qk, &v);
                axpy(-c, qk, &mut v);
            }
        }
        let n = norm(&v);
        if !(n > 1e-10 * original.max(f64::MIN_POSITIVE)) {
            return Err(Error::Degenerate("linearly dependent columns"));
        }
        for x in v.iter_mut() {
            *x /= n;
        }
        q.push(v);
    }
    Ok(Mat::from_fn(rows, cols, |i, j| q[j][i]))
}
