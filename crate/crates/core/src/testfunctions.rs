//! Benchmark integrands with exact reference means.

use serde::{Deserialize, Serialize};

use crate::domain::{Distribution, Point};
use crate::error::{Error, Result};

/// Largest bitstring length whose mean is computed by enumeration.
pub const MAX_ENUMERATION_DIM: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `(x - 0.2)^2` in one dimension.
    Quadratic1d,
    /// `sum_i (1 - x_i)^2 + 100 (x_{i+1} - x_i^2)^2`.
    Rosenbrock { dim: usize },
    /// Four Peaks on `dim` bits with threshold `t` (default `round(0.1 dim)`).
    FourPeaks {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<usize>,
    },
}

impl TestFunction {
    pub fn rosenbrock(dim: usize) -> Result<Self> {
        let f = TestFunction::Rosenbrock { dim };
        f.validate()?;
        Ok(f)
    }

    pub fn four_peaks(dim: usize, t: usize) -> Result<Self> {
        let f = TestFunction::FourPeaks { dim, t: Some(t) };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TestFunction::Quadratic1d => Ok(()),
            TestFunction::Rosenbrock { dim } if dim < 2 => Err(Error::InvalidData(format!(
                "rosenbrock needs at least 2 dimensions, got {dim}"
            ))),
            TestFunction::Rosenbrock { .. } => Ok(()),
            TestFunction::FourPeaks { dim: 0, .. } => {
                Err(Error::InvalidData("four peaks needs at least one bit".into()))
            }
            TestFunction::FourPeaks { dim, .. } => {
                let t = self.threshold();
                if t >= dim {
                    return Err(Error::InvalidData(format!(
                        "four peaks threshold {t} must be below the length {dim}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            TestFunction::Quadratic1d => 1,
            TestFunction::Rosenbrock { dim } | TestFunction::FourPeaks { dim, .. } => dim,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            TestFunction::Quadratic1d => "quadratic1d".into(),
            TestFunction::Rosenbrock { dim } => format!("rosenbrock{dim}"),
            TestFunction::FourPeaks { dim, .. } => {
                format!("four_peaks{dim}_t{}", self.threshold())
            }
        }
    }

    /// Four Peaks threshold; 0 for the other functions.
    pub fn threshold(&self) -> usize {
        match *self {
            TestFunction::FourPeaks { dim, t } => t.unwrap_or_else(|| (0.1 * dim as f64).round() as usize),
            _ => 0,
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let c = x.coords();
        Ok(match *self {
            TestFunction::Quadratic1d => (c[0] - 0.2).powi(2),
            TestFunction::Rosenbrock { .. } => rosenbrock(c),
            TestFunction::FourPeaks { dim, .. } => {
                if !x.is_categorical() {
                    return Err(Error::InvalidData(
                        "four peaks expects coordinates in {-1, +1}".into(),
                    ));
                }
                let bits: Vec<bool> = c.iter().map(|&v| v > 0.0).collect();
                four_peaks(&bits, self.threshold(), dim)
            }
        })
    }

    /// Exact mean of the function under `p`.
    pub fn reference_mean(&self, p: &Distribution) -> Result<f64> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        let unsupported = || {
            Error::Unsupported(format!(
                "no reference mean for {} under {}",
                self.name(),
                p.kind_name()
            ))
        };
        match *self {
            TestFunction::Quadratic1d | TestFunction::Rosenbrock { .. } => {
                if p.is_categorical() {
                    return Err(unsupported());
                }
                let m = p.moments().map_err(|_| unsupported())?;
                if let TestFunction::Quadratic1d = self {
                    return Ok(m.raw(0, 2) - 0.4 * m.raw(0, 1) + 0.04);
                }
                Ok((0..self.dim() - 1)
                    .map(|i| {
                        let (m1, m2, m4) = (m.raw(i, 1), m.raw(i, 2), m.raw(i, 4));
                        let (n1, n2) = (m.raw(i + 1, 1), m.raw(i + 1, 2));
                        (1.0 - 2.0 * m1 + m2) + 100.0 * (n2 - 2.0 * n1 * m2 + m4)
                    })
                    .sum())
            }
            TestFunction::FourPeaks { dim, .. } => {
                if !matches!(p, Distribution::UniformBits { .. }) {
                    return Err(unsupported());
                }
                if dim > MAX_ENUMERATION_DIM {
                    return Err(Error::TooManyDimensions {
                        requested: dim,
                        max: MAX_ENUMERATION_DIM,
                    });
                }
                let t = self.threshold();
                let total: f64 = (0u64..1 << dim)
                    .map(|code| {
                        let bits: Vec<bool> = (0..dim).map(|i| code >> i & 1 == 1).collect();
                        four_peaks(&bits, t, dim)
                    })
                    .sum();
                Ok(total / (1u64 << dim) as f64)
            }
        }
    }
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| (1.0 - w[0]).powi(2) + 100.0 * (w[1] - w[0] * w[0]).powi(2))
        .sum()
}

fn four_peaks(bits: &[bool], t: usize, d: usize) -> f64 {
    let o = bits.iter().take_while(|&&b| b).count();
    let z = bits.iter().rev().take_while(|&&b| !b).count();
    let bonus = if o > t && z > t { d } else { 0 };
    (o.max(z) + bonus) as f64
}
