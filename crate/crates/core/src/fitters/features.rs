use serde::{Deserialize, Serialize};

/// Frequency convention for the Fourier basis on the box coordinate
/// `u = (x - x_min) / (x_max - x_min)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourierFrequencies {
    /// `w_j = 2 pi j`: harmonics that are periodic on the box.
    #[default]
    Periodic,
    /// `w_j = j`: less than one period across the box.
    Literal,
}

impl FourierFrequencies {
    pub fn omega(self, j: usize) -> f64 {
        match self {
            FourierFrequencies::Periodic => 2.0 * std::f64::consts::PI * j as f64,
            FourierFrequencies::Literal => j as f64,
        }
    }
}

/// Phase applied to every Fourier term.
pub const FOURIER_PHASE: f64 = -std::f64::consts::PI;

/// A concrete feature map `x -> phi(x)` for a fixed input dimension.
/// Feature 0 is always the intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FeatureMap {
    /// `1, x_1, ..., x_d`
    Linear { dim: usize },
    /// `1`, then `x_i, x_i^2, x_i^3` for each dimension in turn.
    Poly3 { dim: usize },
    /// `1`, then for each dimension and `j = 1..=harmonics` the pair
    /// `cos(w_j u + phase), sin(w_j u + phase)`.
    Fourier {
        harmonics: usize,
        frequencies: FourierFrequencies,
        domain: Vec<(f64, f64)>,
    },
    /// `1`, `x_i`, then `x_i x_j` for `i < j` when `max_order = 2`.
    Walsh { dim: usize, max_order: usize },
}

impl FeatureMap {
    pub fn dim(&self) -> usize {
        match self {
            FeatureMap::Linear { dim } | FeatureMap::Poly3 { dim } | FeatureMap::Walsh { dim, .. } => *dim,
            FeatureMap::Fourier { domain, .. } => domain.len(),
        }
    }

    pub fn len(&self) -> usize {
        let d = self.dim();
        match self {
            FeatureMap::Linear { .. } => 1 + d,
            FeatureMap::Poly3 { .. } => 1 + 3 * d,
            FeatureMap::Fourier { harmonics, .. } => 1 + 2 * harmonics * d,
            FeatureMap::Walsh { max_order, .. } => {
                1 + d + if *max_order >= 2 { d * (d - 1) / 2 } else { 0 }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Write `phi(x)` into `out` (length [`FeatureMap::len`]).
    pub fn fill(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        out[0] = 1.0;
        match self {
            FeatureMap::Linear { .. } => out[1..].copy_from_slice(x),
            FeatureMap::Poly3 { .. } => {
                for (i, &v) in x.iter().enumerate() {
                    let v2 = v * v;
                    out[1 + 3 * i] = v;
                    out[2 + 3 * i] = v2;
                    out[3 + 3 * i] = v2 * v;
                }
            }
            FeatureMap::Fourier {
                harmonics,
                frequencies,
                domain,
            } => {
                let mut k = 1;
                for (i, &v) in x.iter().enumerate() {
                    let (a, b) = domain[i];
                    let u = (v - a) / (b - a);
                    for j in 1..=*harmonics {
                        let arg = frequencies.omega(j) * u + FOURIER_PHASE;
                        let (s, c) = arg.sin_cos();
                        out[k] = c;
                        out[k + 1] = s;
                        k += 2;
                    }
                }
            }
            FeatureMap::Walsh { dim, max_order } => {
                out[1..1 + dim].copy_from_slice(x);
                if *max_order >= 2 {
                    let mut k = 1 + dim;
                    for i in 0..*dim {
                        for j in i + 1..*dim {
                            out[k] = x[i] * x[j];
                            k += 1;
                        }
                    }
                }
            }
        }
    }

    pub fn features(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.fill(x, &mut out);
        out
    }
}
