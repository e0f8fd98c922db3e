use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numerics::{Mat, RngState};
use crate::{Error, Result};

/// Orthonormal real Fourier basis of `R^n` (rows are basis vectors).
///
/// Row order: DC, then `cos_k, sin_k` for `k = 1, 2, ...`, and for even `n`
/// the alternating Nyquist row last. Row `b` belongs to frequency band
/// [`FourierBasis::band_of`]`(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasis {
    rows: Mat,
    bands: Vec<usize>,
}

impl FourierBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("Fourier basis needs n >= 2"));
        }
        let nf = n as f64;
        let mut data = Vec::with_capacity(n * n);
        let mut bands = Vec::with_capacity(n);
        data.extend(core::iter::repeat_n(1.0 / libm::sqrt(nf), n));
        bands.push(0);
        let c = libm::sqrt(2.0 / nf);
        for k in 1..n.div_ceil(2) {
            for i in 0..n {
                data.push(c * libm::cos(2.0 * PI * (k * i) as f64 / nf));
            }
            for i in 0..n {
                data.push(c * libm::sin(2.0 * PI * (k * i) as f64 / nf));
            }
            bands.push(k);
            bands.push(k);
        }
        if n % 2 == 0 {
            for i in 0..n {
                data.push(if i % 2 == 0 { 1.0 } else { -1.0 } / libm::sqrt(nf));
            }
            bands.push(n / 2);
        }
        Ok(Self {
            rows: Mat::from_vec(n, n, data)?,
            bands,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.rows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.rows
    }

    pub fn band_of(&self, row: usize) -> usize {
        self.bands[row]
    }

    /// Number of frequency bands, `n/2 + 1`.
    pub fn num_bands(&self) -> usize {
        self.n() / 2 + 1
    }

    /// Basis rows spanning frequencies `lo..=hi`.
    pub fn band_rows(&self, lo: usize, hi: usize) -> Vec<usize> {
        (0..self.n()).filter(|&b| (lo..=hi).contains(&self.bands[b])).collect()
    }

    /// Coefficients of each row of `x` (`batch x n`).
    pub fn analyze(&self, x: &Mat) -> Result<Mat> {
        x.matmul_t(&self.rows)
    }

    /// Inverse of [`FourierBasis::analyze`].
    pub fn synthesize(&self, coeffs: &Mat) -> Result<Mat> {
        coeffs.matmul(&self.rows)
    }

    /// Per-band mean power of `x`: `Σ_{b in band} c_b² / n`, summing to
    /// `mean(x²)`.
    pub fn band_energies(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::dim("band_energies", self.n(), x.len()));
        }
        let mut e = vec![0.0; self.num_bands()];
        for b in 0..self.n() {
            let c = crate::numerics::dot(self.rows.row(b), x);
            e[self.bands[b]] += c * c;
        }
        let nf = self.n() as f64;
        for v in &mut e {
            *v /= nf;
        }
        Ok(e)
    }
}

/// Synthetic 1-D signals: a smooth base waveform shifted by a semantic phase
/// `θ`, plus random detail in a band just above the base band.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SignalSpec {
    pub n: usize,
    /// Highest frequency of the base band.
    pub k_low: usize,
    /// Detail occupies frequencies `k_low + 1 ..= k_low + n_detail`.
    pub n_detail: usize,
    pub sigma_v: f64,
    /// Amplitude of base harmonic `k = 1..=k_low`.
    pub base_amplitudes: Vec<f64>,
    pub base_phases: Vec<f64>,
}

impl Default for SignalSpec {
    fn default() -> Self {
        Self {
            n: 64,
            k_low: 4,
            n_detail: 6,
            sigma_v: 0.3,
            base_amplitudes: vec![1.0, 0.7, 0.5, 0.35],
            base_phases: vec![0.0, 0.9, 2.1, 4.0],
        }
    }
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.k_low == 0 || 2 * self.k_low >= self.n {
            return Err(Error::InvalidArgument("signal spec needs 1 <= k_low < n/2"));
        }
        if self.n_detail == 0 || 2 * (self.k_low + self.n_detail) >= self.n {
            return Err(Error::InvalidArgument("detail band must lie strictly below n/2"));
        }
        if !(self.sigma_v >= 0.0) {
            return Err(Error::InvalidArgument("sigma_v must be non-negative"));
        }
        if self.base_amplitudes.len() != self.k_low || self.base_phases.len() != self.k_low {
            return Err(Error::InvalidArgument("need one base amplitude and phase per low frequency"));
        }
        Ok(())
    }

    /// Number of detail coefficients (cos and sin per detail frequency).
    pub fn detail_dim(&self) -> usize {
        2 * self.n_detail
    }

    /// Norm of the base waveform; independent of `θ`.
    pub fn base_norm(&self) -> f64 {
        let nf = self.n as f64;
        libm::sqrt(self.base_amplitudes.iter().map(|a| a * a * nf / 2.0).sum())
    }

    pub fn base(&self, theta: f64) -> Vec<f64> {
        let nf = self.n as f64;
        (0..self.n)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / nf + theta;
                self.base_amplitudes
                    .iter()
                    .zip(&self.base_phases)
                    .enumerate()
                    .map(|(k, (a, p))| a * libm::cos((k + 1) as f64 * x + p))
                    .sum()
            })
            .collect()
    }

    /// Expands `v` over the orthonormal detail-band basis rows.
    pub fn detail(&self, basis: &FourierBasis, v: &[f64]) -> Result<Vec<f64>> {
        let rows = basis.band_rows(self.k_low + 1, self.k_low + self.n_detail);
        if v.len() != rows.len() {
            return Err(Error::dim("SignalSpec::detail", rows.len(), v.len()));
        }
        let mut out = vec![0.0; self.n];
        for (&b, &c) in rows.iter().zip(v) {
            crate::numerics::axpy(c, basis.matrix().row(b), &mut out);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub theta: f64,
    pub v: Vec<f64>,
}

/// Generator of [`Sample`]s with a cached Fourier basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSource {
    spec: SignalSpec,
    basis: FourierBasis,
}

impl SignalSource {
    pub fn new(spec: SignalSpec) -> Result<Self> {
        spec.validate()?;
        let basis = FourierBasis::new(spec.n)?;
        Ok(Self { spec, basis })
    }

    pub fn spec(&self) -> &SignalSpec {
        &self.spec
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    pub fn sample(&self, rng: &mut RngState) -> Sample {
        let theta = 2.0 * PI * rng.uniform();
        let v: Vec<f64> = (0..self.spec.detail_dim())
            .map(|_| self.spec.sigma_v * rng.normal())
            .collect();
        let detail = self.spec.detail(&self.basis, &v).expect("v has detail_dim entries");
        let x = self
            .spec
            .base(theta)
            .iter()
            .zip(&detail)
            .map(|(b, d)| b + d)
            .collect();
        Sample { x, theta, v }
    }

    /// `n` signals as rows of a matrix, plus their phases.
    pub fn batch(&self, count: usize, rng: &mut RngState) -> (Mat, Vec<f64>) {
        let mut x = Mat::zeros(count, self.spec.n);
        let mut thetas = Vec::with_capacity(count);
        for i in 0..count {
            let s = self.sample(rng);
            x.row_mut(i).copy_from_slice(&s.x);
            thetas.push(s.theta);
        }
        (x, thetas)
    }

    /// Energy above the base band, `Σ_{k > k_low} c_k²`, per row mean.
    pub fn high_band_energy(&self, x: &Mat) -> Result<f64> {
        let rows = self.basis.band_rows(self.spec.k_low + 1, self.spec.n);
        let c = self.basis.analyze(x)?;
        let total: f64 = c
            .row_iter()
            .map(|r| rows.iter().map(|&b| r[b] * r[b]).sum::<f64>())
            .sum();
        Ok(total / x.rows().max(1) as f64)
    }
}

/// Draws one [`Sample`].
pub fn gen_sample(spec: &SignalSpec, rng: &mut RngState) -> Result<Sample> {
    Ok(SignalSource::new(spec.clone())?.sample(rng))
}
