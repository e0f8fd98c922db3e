use core::f64::consts::PI;

use crate::numerics::{Mat, RngState};

/// Simple 2-D point clouds used as the intrinsic data of the toy experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum ToyDistribution {
    /// Two interleaved half circles with jitter drawn uniformly from a disc of
    /// radius `noise`, all multiplied by `scale`.
    TwoMoons { noise: f64, scale: f64 },
    /// Isotropic Gaussians of width `std` at `modes` equally spaced angles.
    GaussianRing { modes: usize, radius: f64, std: f64 },
    /// Uniform on the dark squares of a `cells x cells` board spanning
    /// `[-half_width, half_width]^2`.
    Checkerboard { cells: usize, half_width: f64 },
}

impl Default for ToyDistribution {
    fn default() -> Self {
        Self::two_moons()
    }
}

impl ToyDistribution {
    pub fn two_moons() -> Self {
        Self::TwoMoons { noise: 0.1, scale: 1.0 }
    }

    pub fn gaussian_ring() -> Self {
        Self::GaussianRing {
            modes: 8,
            radius: 2.0,
            std: 0.15,
        }
    }

    pub fn checkerboard() -> Self {
        Self::Checkerboard {
            cells: 4,
            half_width: 2.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::TwoMoons { .. } => "two_moons",
            Self::GaussianRing { .. } => "gaussian_ring",
            Self::Checkerboard { .. } => "checkerboard",
        }
    }

    fn draw(&self, rng: &mut RngState) -> [f64; 2] {
        match *self {
            Self::TwoMoons { noise, scale } => {
                let angle = PI * rng.uniform();
                let (c, s) = (libm::cos(angle), libm::sin(angle));
                let (x, y) = if rng.uniform() < 0.5 {
                    (c, s)
                } else {
                    (1.0 - c, 0.5 - s)
                };
                let r = noise * libm::sqrt(rng.uniform());
                let phi = 2.0 * PI * rng.uniform();
                [scale * (x + r * libm::cos(phi)), scale * (y + r * libm::sin(phi))]
            }
            Self::GaussianRing { modes, radius, std } => {
                let k = rng.below(modes.max(1));
                let angle = 2.0 * PI * k as f64 / modes.max(1) as f64;
                [
                    radius * libm::cos(angle) + std * rng.normal(),
                    radius * libm::sin(angle) + std * rng.normal(),
                ]
            }
            Self::Checkerboard { cells, half_width } => {
                let cells = cells.max(1);
                let width = 2.0 * half_width / cells as f64;
                // dark squares are those with even (row + col)
                let dark = (cells * cells).div_ceil(2);
                let pick = rng.below(dark);
                let (mut seen, mut row, mut col) = (0, 0, 0);
                'outer: for r in 0..cells {
                    for c in 0..cells {
                        if (r + c) % 2 == 0 {
                            if seen == pick {
                                row = r;
                                col = c;
                                break 'outer;
                            }
                            seen += 1;
                        }
                    }
                }
                [
                    -half_width + width * (col as f64 + rng.uniform()),
                    -half_width + width * (row as f64 + rng.uniform()),
                ]
            }
        }
    }

    /// `n` i.i.d. draws as an `n x 2` matrix.
    pub fn sample(&self, n: usize, rng: &mut RngState) -> Mat {
        let mut out = Mat::zeros(n, 2);
        for i in 0..n {
            let p = self.draw(rng);
            out.row_mut(i).copy_from_slice(&p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_is_centered() {
        let s = ToyDistribution::gaussian_ring().sample(10_000, &mut RngState::new(1));
        let m = s.column_means();
        assert!(libm::hypot(m[0], m[1]) < 0.05, "{m:?}");
    }

    #[test]
    fn moons_stay_in_box() {
        let s = ToyDistribution::two_moons().sample(5000, &mut RngState::new(2));
        for p in s.row_iter() {
            assert!((-1.5..=2.5).contains(&p[0]) && (-1.0..=1.5).contains(&p[1]), "{p:?}");
        }
    }

    #[test]
    fn checkerboard_hits_dark_squares_only() {
        let s = ToyDistribution::checkerboard().sample(2000, &mut RngState::new(3));
        for p in s.row_iter() {
            let c = libm::floor(p[0] + 2.0) as i64;
            let r = libm::floor(p[1] + 2.0) as i64;
            assert_eq!((r + c) % 2, 0, "{p:?}");
        }
    }

    #[test]
    fn draws_are_reproducible() {
        for d in [
            ToyDistribution::two_moons(),
            ToyDistribution::gaussian_ring(),
            ToyDistribution::checkerboard(),
        ] {
            let a = d.sample(50, &mut RngState::new(9));
            let b = d.sample(50, &mut RngState::new(9));
            assert_eq!(a, b);
            assert!(a.is_finite());
        }
    }
}
