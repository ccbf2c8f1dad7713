//! Least-squares surrogates whose expected value under the sampling
//! distribution is available in closed form (or cheaply by sampling).

mod features;
pub mod lstsq;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use features::{FeatureMap, FourierFrequencies, FOURIER_PHASE};

use crate::domain::{Distribution, Point, RngStream};
use crate::error::{Error, Result};

/// Default number of draws for sampled fit means.
pub const DEFAULT_MC_MEAN_SAMPLES: usize = 300;

fn default_harmonics() -> usize {
    6
}

fn default_order() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitterKind {
    Linear,
    /// Per-dimension cubic without cross terms.
    Poly3,
    Fourier {
        #[serde(default = "default_harmonics")]
        harmonics: usize,
        #[serde(default)]
        frequencies: FourierFrequencies,
    },
    /// Truncated Walsh expansion over `±1` bitstrings.
    Walsh {
        #[serde(default = "default_order")]
        max_order: usize,
    },
}

/// What to fit and how.
///
/// `domain` fixes the per-dimension box `(x_min, x_max)` used by the Fourier
/// basis; when absent the box is taken from the training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitterSpec {
    #[serde(flatten)]
    pub kind: FitterKind,
    #[serde(default)]
    pub ridge: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<(f64, f64)>>,
}

impl FitterSpec {
    pub fn new(kind: FitterKind) -> Self {
        Self {
            kind,
            ridge: 0.0,
            domain: None,
        }
    }

    pub fn linear() -> Self {
        Self::new(FitterKind::Linear)
    }

    pub fn poly3() -> Self {
        Self::new(FitterKind::Poly3)
    }

    pub fn fourier() -> Self {
        Self::new(FitterKind::Fourier {
            harmonics: default_harmonics(),
            frequencies: FourierFrequencies::default(),
        })
    }

    pub fn walsh(max_order: usize) -> Self {
        Self::new(FitterKind::Walsh { max_order })
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    /// Pin the Fourier box to the reference box of `p` unless one is set.
    pub fn bound_to(&self, p: &Distribution) -> Self {
        let mut spec = self.clone();
        if spec.domain.is_none() {
            if let FitterKind::Fourier { .. } = spec.kind {
                spec.domain = Some(p.reference_box());
            }
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidData(m.to_string()));
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return bad("ridge must be finite and nonnegative");
        }
        match self.kind {
            FitterKind::Fourier { harmonics: 0, .. } => {
                bad("fourier needs at least one harmonic")
            }
            FitterKind::Walsh { max_order } if !(1..=2).contains(&max_order) => {
                bad("walsh max_order must be 1 or 2")
            }
            _ => Ok(()),
        }
    }

    /// Short name used in result tables.
    pub fn label(&self) -> &'static str {
        match self.kind {
            FitterKind::Linear => "linear",
            FitterKind::Poly3 => "poly3",
            FitterKind::Fourier { .. } => "fourier",
            FitterKind::Walsh { .. } => "walsh",
        }
    }

    fn feature_map(&self, x: &[Point]) -> FeatureMap {
        let dim = x[0].dim();
        match self.kind {
            FitterKind::Linear => FeatureMap::Linear { dim },
            FitterKind::Poly3 => FeatureMap::Poly3 { dim },
            FitterKind::Walsh { max_order } => FeatureMap::Walsh { dim, max_order },
            FitterKind::Fourier {
                harmonics,
                frequencies,
            } => FeatureMap::Fourier {
                harmonics,
                frequencies,
                domain: self.domain.clone().unwrap_or_else(|| data_box(x)),
            },
        }
    }
}

fn data_box(x: &[Point]) -> Vec<(f64, f64)> {
    (0..x[0].dim())
        .map(|j| {
            let (lo, hi) = x
                .iter()
                .map(|p| p[j])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, lo + 0.5)
            }
        })
        .collect()
}

/// A trained surrogate `g(x) = phi(x) . beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    spec: FitterSpec,
    map: FeatureMap,
    beta: Vec<f64>,
}

impl FitModel {
    /// A model with explicit coefficients (mostly for tests and tooling).
    pub fn from_coefficients(spec: FitterSpec, map: FeatureMap, beta: Vec<f64>) -> Result<Self> {
        if beta.len() != map.len() {
            return Err(Error::LengthMismatch {
                what: "coefficients and features",
                left: beta.len(),
                right: map.len(),
            });
        }
        Ok(Self { spec, map, beta })
    }

    pub fn spec(&self) -> &FitterSpec {
        &self.spec
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.map
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    /// `g(x)` without a dimension check; `x` must have length [`Self::dim`].
    pub(crate) fn eval(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        self.map.fill(x, scratch);
        scratch.iter().zip(&self.beta).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn scratch(&self) -> Vec<f64> {
        vec![0.0; self.map.len()]
    }

    /// Predictions at every point of `xs`, in order.
    pub(crate) fn eval_many<'a>(&self, xs: impl IntoIterator<Item = &'a Point>) -> Vec<f64> {
        let mut scratch = self.scratch();
        xs.into_iter()
            .map(|x| self.eval(x.coords(), &mut scratch))
            .collect()
    }
}

/// Fit `spec` to `(x, y)` by (ridge) least squares.
pub fn train(spec: &FitterSpec, x: &[Point], y: &[f64]) -> Result<FitModel> {
    spec.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "training points and targets",
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let d = x[0].dim();
    if let Some(p) = x.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    let map = spec.feature_map(x);
    if map.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            got: d,
        });
    }
    let p = map.len();
    let mut rows = vec![0.0; x.len() * p];
    for (pt, row) in x.iter().zip(rows.chunks_exact_mut(p)) {
        map.fill(pt.coords(), row);
    }
    let phi = DMatrix::from_row_slice(x.len(), p, &rows);
    let beta = lstsq::solve(phi, DVector::from_column_slice(y), spec.ridge)?;
    Ok(FitModel {
        spec: spec.clone(),
        map,
        beta: beta.as_slice().to_vec(),
    })
}

pub fn predict(model: &FitModel, x: &Point) -> Result<f64> {
    if x.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: x.dim(),
        });
    }
    Ok(model.eval(x.coords(), &mut model.scratch()))
}

/// Exact `E_p[g]`.
///
/// Supported: linear, cubic and Fourier fits under a uniform box or an IID
/// Gaussian; Walsh fits under uniform bitstrings, where the mean is the
/// intercept. Other pairs return [`Error::Unsupported`]; use [`mc_mean`].
pub fn analytic_mean(model: &FitModel, p: &Distribution) -> Result<f64> {
    if p.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: p.dim(),
        });
    }
    let unsupported = || {
        Err(Error::Unsupported(format!(
            "no closed-form mean for a {} fit under {}; use mc_mean",
            model.spec.label(),
            p.kind_name()
        )))
    };
    let beta = &model.beta;
    match (&model.map, p) {
        (FeatureMap::Walsh { .. }, Distribution::UniformBits { .. }) => Ok(beta[0]),
        (FeatureMap::Walsh { .. }, _) | (_, Distribution::UniformBits { .. }) => unsupported(),
        (_, Distribution::ProductQuadratic { .. }) => unsupported(),
        (FeatureMap::Linear { dim }, _) => {
            let m = p.moments()?;
            Ok(beta[0] + (0..*dim).map(|i| beta[1 + i] * m.raw(i, 1)).sum::<f64>())
        }
        (FeatureMap::Poly3 { dim }, _) => {
            let m = p.moments()?;
            let mut total = beta[0];
            for i in 0..*dim {
                for k in 1..=3 {
                    total += beta[3 * i + k] * m.raw(i, k);
                }
            }
            Ok(total)
        }
        (
            FeatureMap::Fourier {
                harmonics,
                frequencies,
                domain,
            },
            _,
        ) => {
            let m = p.moments()?;
            let mut total = beta[0];
            let mut k = 1;
            for (i, &(a, b)) in domain.iter().enumerate() {
                for j in 1..=*harmonics {
                    let (c, s) = m.trig(i, frequencies.omega(j), FOURIER_PHASE, a, b);
                    total += beta[k] * c + beta[k + 1] * s;
                    k += 2;
                }
            }
            Ok(total)
        }
    }
}

/// Whether [`analytic_mean`] supports fits of `spec` under `p`.
pub fn has_analytic_mean(spec: &FitterSpec, p: &Distribution) -> bool {
    match (&spec.kind, p) {
        (FitterKind::Walsh { .. }, Distribution::UniformBits { .. }) => true,
        (FitterKind::Walsh { .. }, _) => false,
        (_, Distribution::UniformBox { .. } | Distribution::GaussianIid { .. }) => true,
        _ => false,
    }
}

/// `(1/n) sum g(x_j)` with `x_j ~ q`.
pub fn mc_mean(model: &FitModel, q: &Distribution, n_mean: usize, rng: &mut RngStream) -> Result<f64> {
    if n_mean == 0 {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    if q.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: q.dim(),
        });
    }
    let mut scratch = model.scratch();
    let first = model.eval(q.sample(rng).coords(), &mut scratch);
    // shifted accumulation keeps a constant model exact
    let mut shift = 0.0;
    for _ in 1..n_mean {
        shift += model.eval(q.sample(rng).coords(), &mut scratch) - first;
    }
    Ok(first + shift / n_mean as f64)
}
