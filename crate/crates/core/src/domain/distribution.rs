use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use super::moments::{CoordinateLaw, MomentTable};
use super::point::Point;
use super::rng::RngStream;
use crate::error::{Error, Result};

/// Probability measures over the sample space.
///
/// `ProductQuadratic` is the importance density on a box whose per-dimension
/// density is `(12/7)(1/w)(s^2 + 1/4)` with `w = hi - lo` and
/// `s = 2(x - lo)/w - 1`. It grows quadratically towards both faces of the
/// box and integrates to exactly one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
    GaussianIid { mu: f64, sigma: f64, dim: usize },
    UniformBits { dim: usize },
    ProductQuadratic { lo: Vec<f64>, hi: Vec<f64> },
}

/// Standard normal quantile.
pub(crate) fn normal_quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

/// Inverse CDF of the ProductQuadratic marginal on `s in [-1, 1]`.
///
/// `F(s) = (2/7)s^3 + (3/14)s + 1/2`; `F(s) = u` is the depressed cubic
/// `s^3 + (3/4)s + (7 - 14u)/4 = 0`, which has a single real root.
fn product_quadratic_quantile(u: f64) -> f64 {
    let p = 0.75;
    let q = (7.0 - 14.0 * u) / 4.0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut s = (-q / 2.0 + disc).cbrt() + (-q / 2.0 - disc).cbrt();
    // one Newton polish on the monotone CDF
    let f = (2.0 / 7.0) * s * s * s + (3.0 / 14.0) * s + 0.5 - u;
    let df = (6.0 / 7.0) * (s * s + 0.25);
    s -= f / df;
    s.clamp(-1.0, 1.0)
}

fn product_quadratic_marginal(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo || x > hi {
        return 0.0;
    }
    let w = hi - lo;
    let s = 2.0 * (x - lo) / w - 1.0;
    (12.0 / 7.0) / w * (s * s + 0.25)
}

impl Distribution {
    pub fn uniform_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let d = Distribution::UniformBox { lo, hi };
        d.validate()?;
        Ok(d)
    }

    /// The cube `[lo, hi]^dim`.
    pub fn uniform_cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::uniform_box(vec![lo; dim], vec![hi; dim])
    }

    pub fn gaussian(mu: f64, sigma: f64, dim: usize) -> Result<Self> {
        let d = Distribution::GaussianIid { mu, sigma, dim };
        d.validate()?;
        Ok(d)
    }

    pub fn bits(dim: usize) -> Result<Self> {
        let d = Distribution::UniformBits { dim };
        d.validate()?;
        Ok(d)
    }

    pub fn product_quadratic(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let d = Distribution::ProductQuadratic { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        match self {
            Distribution::UniformBox { lo, hi } | Distribution::ProductQuadratic { lo, hi } => {
                if lo.is_empty() {
                    return bad("box needs dimension >= 1".into());
                }
                if lo.len() != hi.len() {
                    return bad(format!(
                        "box bounds differ in length ({} vs {})",
                        lo.len(),
                        hi.len()
                    ));
                }
                if let Some(i) = (0..lo.len()).find(|&i| !hi[i].is_finite() || !lo[i].is_finite() || lo[i] >= hi[i]) {
                    return bad(format!("box requires finite lo < hi (dimension {i})"));
                }
                Ok(())
            }
            Distribution::GaussianIid { mu, sigma, dim } => {
                if *dim == 0 {
                    return bad("gaussian needs dimension >= 1".into());
                }
                if !(*sigma > 0.0 && sigma.is_finite()) || !mu.is_finite() {
                    return bad(format!("gaussian requires finite mu and sigma > 0 (sigma = {sigma})"));
                }
                Ok(())
            }
            Distribution::UniformBits { dim } => {
                if *dim == 0 {
                    return bad("bitstrings need dimension >= 1".into());
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Distribution::UniformBox { lo, .. } | Distribution::ProductQuadratic { lo, .. } => {
                lo.len()
            }
            Distribution::GaussianIid { dim, .. } | Distribution::UniformBits { dim } => *dim,
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, Distribution::UniformBits { .. })
    }

    /// Density (probability mass for bitstrings) at `x`.
    pub fn density(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return 0.0;
        }
        match self {
            Distribution::UniformBits { dim } => {
                if x.iter().all(|&c| c == 1.0 || c == -1.0) {
                    0.5f64.powi(*dim as i32)
                } else {
                    0.0
                }
            }
            _ => (0..x.len()).map(|i| self.marginal_density(i, x[i])).product(),
        }
    }

    /// Density of coordinate `dim` at `x` (continuous distributions only;
    /// bitstrings give the mass `1/2` at `±1`).
    pub fn marginal_density(&self, dim: usize, x: f64) -> f64 {
        match self {
            Distribution::UniformBox { lo, hi } => {
                if x < lo[dim] || x > hi[dim] {
                    0.0
                } else {
                    1.0 / (hi[dim] - lo[dim])
                }
            }
            Distribution::GaussianIid { mu, sigma, .. } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Distribution::ProductQuadratic { lo, hi } => {
                product_quadratic_marginal(x, lo[dim], hi[dim])
            }
            Distribution::UniformBits { .. } => {
                if x == 1.0 || x == -1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// Quantile of coordinate `dim`, for `u` in (0, 1).
    pub fn quantile(&self, dim: usize, u: f64) -> Result<f64> {
        match self {
            Distribution::UniformBox { lo, hi } => Ok(lo[dim] + u * (hi[dim] - lo[dim])),
            Distribution::GaussianIid { mu, sigma, .. } => Ok(mu + sigma * normal_quantile(u)),
            Distribution::ProductQuadratic { lo, hi } => {
                let s = product_quadratic_quantile(u);
                Ok(lo[dim] + 0.5 * (s + 1.0) * (hi[dim] - lo[dim]))
            }
            Distribution::UniformBits { .. } => Err(Error::Unsupported(
                "bitstring distributions have no continuous quantile".into(),
            )),
        }
    }

    /// One independent draw.
    pub fn sample(&self, rng: &mut RngStream) -> Point {
        let coords = match self {
            Distribution::UniformBox { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| a + rng.uniform() * (b - a))
                .collect(),
            Distribution::GaussianIid { mu, sigma, dim } => (0..*dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    mu + sigma * z
                })
                .collect(),
            Distribution::UniformBits { dim } => (0..*dim)
                .map(|_| if rng.next_bit() { 1.0 } else { -1.0 })
                .collect(),
            Distribution::ProductQuadratic { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| {
                    let s = product_quadratic_quantile(rng.uniform_open());
                    a + 0.5 * (s + 1.0) * (b - a)
                })
                .collect(),
        };
        Point::from_vec_unchecked(coords)
    }

    /// Raw and trigonometric moment information for analytic fit means.
    pub fn moments(&self) -> Result<MomentTable> {
        match self {
            Distribution::UniformBox { lo, hi } => Ok(MomentTable::from_laws(
                lo.iter()
                    .zip(hi)
                    .map(|(&lo, &hi)| CoordinateLaw::Uniform { lo, hi })
                    .collect(),
            )),
            Distribution::GaussianIid { mu, sigma, dim } => Ok(MomentTable::from_laws(vec![
                CoordinateLaw::Normal {
                    mean: *mu,
                    sd: *sigma
                };
                *dim
            ])),
            other => Err(Error::Unsupported(format!(
                "no moment table for {}",
                other.kind_name()
            ))),
        }
    }

    /// Per-dimension box used to normalise coordinates for box-based feature
    /// maps: the support for boxes, `mu ± 3 sigma` for Gaussians and
    /// `[-1, 1]` for bitstrings.
    pub fn reference_box(&self) -> Vec<(f64, f64)> {
        match self {
            Distribution::UniformBox { lo, hi } | Distribution::ProductQuadratic { lo, hi } => {
                lo.iter().copied().zip(hi.iter().copied()).collect()
            }
            Distribution::GaussianIid { mu, sigma, dim } => {
                vec![(mu - 3.0 * sigma, mu + 3.0 * sigma); *dim]
            }
            Distribution::UniformBits { dim } => vec![(-1.0, 1.0); *dim],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Distribution::UniformBox { .. } => "uniform_box",
            Distribution::GaussianIid { .. } => "gaussian_iid",
            Distribution::UniformBits { .. } => "uniform_bits",
            Distribution::ProductQuadratic { .. } => "product_quadratic",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite trapezoid rule on `[a, b]` with `n` panels.
    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + i as f64 * h);
        }
        s * h
    }

    #[test]
    fn marginal_densities_integrate_to_one() {
        let cases = [
            Distribution::uniform_box(vec![-3.0, 0.0], vec![3.0, 1.0]).unwrap(),
            Distribution::gaussian(0.0, 2.0, 2).unwrap(),
            Distribution::product_quadratic(vec![-3.0, 1.0], vec![3.0, 5.0]).unwrap(),
        ];
        for d in &cases {
            let bx = d.reference_box();
            for (i, &(lo, hi)) in bx.iter().enumerate() {
                let (a, b) = match d {
                    Distribution::GaussianIid { mu, sigma, .. } => (mu - 12.0 * sigma, mu + 12.0 * sigma),
                    _ => (lo, hi),
                };
                let z = trapezoid(|x| d.marginal_density(i, x), a, b, 1_000_000);
                // the box densities jump at the edges; the trapezoid halves the
                // endpoint weights, which is exact for constants and O(h^2) otherwise
                assert!((z - 1.0).abs() < 1e-6, "{} dim {i}: {z}", d.kind_name());
            }
        }
    }

    #[test]
    fn product_quadratic_center_weight() {
        let p = Distribution::uniform_box(vec![-3.0], vec![3.0]).unwrap();
        let q = Distribution::product_quadratic(vec![-3.0], vec![3.0]).unwrap();
        let w = p.density(&[0.0]) / q.density(&[0.0]);
        assert!((w - 7.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn product_quadratic_quantile_inverts_cdf() {
        let cdf = |s: f64| (2.0 / 7.0) * s.powi(3) + (3.0 / 14.0) * s + 0.5;
        for i in 1..1000 {
            let u = i as f64 / 1000.0;
            let s = product_quadratic_quantile(u);
            assert!((cdf(s) - u).abs() < 1e-12, "u={u}");
        }
        assert!((product_quadratic_quantile(0.5)).abs() < 1e-15);
    }

    #[test]
    fn normal_quantile_values() {
        assert_eq!(normal_quantile(0.5), 0.0);
        assert!((normal_quantile(0.841_344_746_068_542_9) - 1.0).abs() < 1e-9);
        assert!((normal_quantile(0.025) + 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(Distribution::uniform_box(vec![1.0], vec![1.0]).is_err());
        assert!(Distribution::uniform_box(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Distribution::gaussian(0.0, 0.0, 1).is_err());
        assert!(Distribution::gaussian(0.0, 1.0, 0).is_err());
        assert!(Distribution::bits(0).is_err());
    }

    #[test]
    fn bit_mass_sums_to_one() {
        let d = Distribution::bits(3).unwrap();
        let mut total = 0.0;
        for m in 0..8u32 {
            let x: Vec<f64> = (0..3).map(|i| if m >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
            total += d.density(&x);
        }
        assert_eq!(total, 1.0);
        assert_eq!(d.density(&[1.0, 0.0, 1.0]), 0.0);
    }

    #[test]
    fn config_round_trip() {
        let d = Distribution::gaussian(0.0, 2.0, 10).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"kind\":\"gaussian_iid\""));
        let back: Distribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
