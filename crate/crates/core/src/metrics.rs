//! Distribution distance, representation alignment, and reconstruction scores.

use alloc::string::String;
use alloc::vec::Vec;

use crate::numerics::{gaussian, norm, Mat, RngState};
use crate::{Error, Result};

pub const DEFAULT_CKNNA_K: usize = 10;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn mean_pairwise(a: &Mat, b: &Mat) -> f64 {
    let mut s = 0.0;
    for ra in a.row_iter() {
        for rb in b.row_iter() {
            s += euclidean(ra, rb);
        }
    }
    s / (a.rows() * b.rows()) as f64
}

/// Energy distance `2 E‖a - b‖ - E‖a - a'‖ - E‖b - b'‖` as a V-statistic
/// (all pairs, including `i == j`). Rows are samples.
pub fn energy_distance(a: &Mat, b: &Mat) -> Result<f64> {
    if a.cols() != b.cols() {
        return Err(Error::dim("energy_distance", a.cols(), b.cols()));
    }
    if a.rows() == 0 || b.rows() == 0 {
        return Err(Error::Degenerate("energy distance of an empty sample"));
    }
    let d = 2.0 * mean_pairwise(a, b) - mean_pairwise(a, a) - mean_pairwise(b, b);
    // the V-statistic is non-negative in exact arithmetic
    Ok(d.max(0.0))
}

fn centered_gram(x: &Mat) -> Mat {
    let means = x.column_means();
    let mut c = x.clone();
    for i in 0..c.rows() {
        for (v, m) in c.row_mut(i).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    // the Gram matrix of column-centered features is already doubly centered
    c.matmul_t(&c).expect("square by construction")
}

/// Indices of the `k` largest off-diagonal entries of row `i`; ties go to the
/// lower index.
fn top_k(gram: &Mat, i: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..gram.rows()).filter(|&j| j != i).collect();
    let row = gram.row(i);
    idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Centered kernel nearest-neighbour alignment between two representations of
/// the same samples (rows aligned).
///
/// Features are column-centered and linear kernels `K = XXᵀ`, `L = YYᵀ` formed.
/// `M_ij = 1` when `j` is among the `k` largest-kernel neighbours of `i` in both
/// `K` and `L`. The score is
/// `Σ M K L / sqrt(Σ M K² · Σ M L²)`,
/// i.e. a cosine between the two centered kernels restricted to mutual
/// neighbour pairs. It equals 1 for identical, rotated, or isotropically
/// rescaled representations.
pub fn cknna(x: &Mat, y: &Mat, k: usize) -> Result<f64> {
    if x.rows() != y.rows() {
        return Err(Error::dim("cknna", x.rows(), y.rows()));
    }
    if k == 0 || x.rows() <= k + 1 {
        return Err(Error::InvalidArgument("cknna needs k >= 1 and more than k + 1 rows"));
    }
    let gk = centered_gram(x);
    let gl = centered_gram(y);
    let (mut kl, mut kk, mut ll) = (0.0, 0.0, 0.0);
    for i in 0..x.rows() {
        let nk = top_k(&gk, i, k);
        let nl = top_k(&gl, i, k);
        // both lists are sorted: merge to find the mutual neighbours
        let (mut a, mut b) = (0, 0);
        while a < nk.len() && b < nl.len() {
            match nk[a].cmp(&nl[b]) {
                core::cmp::Ordering::Less => a += 1,
                core::cmp::Ordering::Greater => b += 1,
                core::cmp::Ordering::Equal => {
                    let j = nk[a];
                    let (kv, lv) = (gk[(i, j)], gl[(i, j)]);
                    kl += kv * lv;
                    kk += kv * kv;
                    ll += lv * lv;
                    a += 1;
                    b += 1;
                }
            }
        }
    }
    if !(kk > 0.0 && ll > 0.0) {
        return Err(Error::Degenerate("cknna: no mutual neighbours with non-zero kernel"));
    }
    Ok(kl / libm::sqrt(kk * ll))
}

pub fn mse(x: &[f64], xbar: &[f64]) -> Result<f64> {
    if x.len() != xbar.len() {
        return Err(Error::dim("mse", x.len(), xbar.len()));
    }
    if x.is_empty() {
        return Err(Error::Degenerate("mse of empty vectors"));
    }
    Ok(x.iter().zip(xbar).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64)
}

/// `10 log10(peak² / MSE)`; a perfect reconstruction gives `f64::INFINITY`.
pub fn psnr(x: &[f64], xbar: &[f64], peak: f64) -> Result<f64> {
    if !(peak > 0.0) {
        return Err(Error::InvalidArgument("psnr peak must be positive"));
    }
    let m = mse(x, xbar)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(peak * peak / m))
}

/// Mean finite-difference gain `‖f(z + δε) - f(z)‖ / δ` over the rows of
/// `z_set` and `trials` independent Gaussian directions per row.
pub fn amplification(
    decode: impl Fn(&Mat) -> Result<Mat>,
    z_set: &Mat,
    delta: f64,
    trials: usize,
    rng: &mut RngState,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("amplification delta must be positive"));
    }
    if trials == 0 || z_set.rows() == 0 {
        return Err(Error::Degenerate("amplification needs samples and trials"));
    }
    let base = decode(z_set)?;
    let mut total = 0.0;
    for _ in 0..trials {
        let mut moved = z_set.clone();
        moved.add_scaled(&gaussian(rng, z_set.rows(), z_set.cols()), delta)?;
        let out = decode(&moved)?.sub(&base)?;
        total += out.row_iter().map(norm).sum::<f64>() / delta;
    }
    Ok(total / (trials * z_set.rows()) as f64)
}

/// One row of a sweep table: named keys, named values, and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub keys: Vec<(String, f64)>,
    pub values: Vec<(String, f64)>,
    pub seed: u64,
}

/// Errors if two records share identical key values.
pub fn check_unique_keys(records: &[SweepRecord]) -> Result<()> {
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            let same = a.keys.len() == b.keys.len()
                && a.keys.iter().zip(&b.keys).all(|(p, q)| p.0 == q.0 && p.1.to_bits() == q.1.to_bits());
            if same {
                return Err(Error::InvalidArgument("duplicate sweep key"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn energy_distance_identical_sets_is_zero() {
        let a = gaussian(&mut RngState::new(1), 30, 3);
        assert_eq!(energy_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn energy_distance_two_points() {
        let a = Mat::from_vec(1, 2, vec![0.0, 0.0]).unwrap();
        let b = Mat::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        assert_eq!(energy_distance(&a, &b).unwrap(), 2.0);
    }

    #[test]
    fn energy_distance_brute_force_and_symmetry() {
        let mut r = RngState::new(2);
        let a = gaussian(&mut r, 7, 2);
        let b = gaussian(&mut r, 5, 2).map(|x| x + 0.5);
        let mut ab = 0.0;
        let mut aa = 0.0;
        let mut bb = 0.0;
        for i in 0..7 {
            for j in 0..5 {
                ab += euclidean(a.row(i), b.row(j));
            }
            for j in 0..7 {
                aa += euclidean(a.row(i), a.row(j));
            }
        }
        for i in 0..5 {
            for j in 0..5 {
                bb += euclidean(b.row(i), b.row(j));
            }
        }
        let want = 2.0 * ab / 35.0 - aa / 49.0 - bb / 25.0;
        let got = energy_distance(&a, &b).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((energy_distance(&b, &a).unwrap() - got).abs() < 1e-12);
        assert!(energy_distance(&a, &Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn energy_distance_rotation_invariant() {
        let mut r = RngState::new(3);
        let a = gaussian(&mut r, 10, 2);
        let b = gaussian(&mut r, 12, 2);
        let (c, s) = (libm::cos(0.7), libm::sin(0.7));
        let rot = Mat::from_vec(2, 2, vec![c, -s, s, c]).unwrap();
        let d0 = energy_distance(&a, &b).unwrap();
        let d1 = energy_distance(&a.matmul(&rot).unwrap(), &b.matmul(&rot).unwrap()).unwrap();
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn cknna_self_rotation_and_scaling() {
        let mut r = RngState::new(4);
        let x = gaussian(&mut r, 60, 5);
        assert!((cknna(&x, &x, 10).unwrap() - 1.0).abs() < 1e-10);
        let (q, _) = crate::numerics::orthonormal_frame(&mut r, 5, 5).unwrap();
        assert!((cknna(&x, &x.matmul(&q).unwrap(), 10).unwrap() - 1.0).abs() < 1e-10);
        assert!((cknna(&x, &x.scale(3.5), 10).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cknna_errors() {
        let x = Mat::zeros(12, 3);
        assert!(matches!(cknna(&x, &x, 3), Err(Error::Degenerate(_))));
        assert!(cknna(&x, &Mat::zeros(11, 3), 3).is_err());
        assert!(cknna(&Mat::zeros(4, 2), &Mat::zeros(4, 2), 3).is_err());
    }

    #[test]
    fn cknna_unrelated_representations_score_low() {
        let mut r = RngState::new(5);
        let x = gaussian(&mut r, 200, 4);
        let y = gaussian(&mut r, 200, 4);
        let s = cknna(&x, &y, 10).unwrap_or(0.0);
        assert!(s < 0.9, "{s}");
    }

    #[test]
    fn psnr_cases() {
        assert_eq!(psnr(&[1.0, 2.0], &[1.0, 2.0], 1.0).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap(), 0.0);
        assert_eq!(psnr(&[0.0], &[2.0], 2.0).unwrap(), 0.0);
        assert!(psnr(&[0.0], &[1.0], 0.0).is_err());
        assert!(psnr(&[0.0], &[1.0, 2.0], 1.0).is_err());
        let a = psnr(&[0.0; 4], &[0.1; 4], 1.0).unwrap();
        let b = psnr(&[0.0; 4], &[0.2; 4], 1.0).unwrap();
        assert!(a > b);
    }

    #[test]
    fn amplification_of_constant_decoder_is_zero() {
        let z = gaussian(&mut RngState::new(6), 10, 3);
        let v = amplification(|m| Ok(Mat::zeros(m.rows(), 2)), &z, 0.1, 5, &mut RngState::new(1)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn unique_keys() {
        let rec = |d: f64| SweepRecord {
            keys: vec![("D".into(), d)],
            values: vec![],
            seed: 0,
        };
        assert!(check_unique_keys(&[rec(1.0), rec(2.0)]).is_ok());
        assert!(check_unique_keys(&[rec(1.0), rec(1.0)]).is_err());
    }
}
