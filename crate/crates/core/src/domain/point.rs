use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sample location. Continuous points hold arbitrary reals; categorical
/// points hold bits encoded as exactly `-1.0` or `+1.0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidData("points need dimension >= 1".into()));
        }
        Ok(Self(coords))
    }

    /// A bitstring point; `true` maps to `+1`, `false` to `-1`.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::new(bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect())
    }

    /// A categorical point from `±1` coordinates.
    pub fn from_signs(signs: Vec<f64>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidData(
                "categorical coordinates must be exactly -1 or +1".into(),
            ));
        }
        Self::new(signs)
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_categorical(&self) -> bool {
        self.0.iter().all(|&c| c == 1.0 || c == -1.0)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Samples `x_i`, their function values `f(x_i)`, and optional importance
/// weights `p(x_i) / q(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet {
    points: Vec<Point>,
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl DataSet {
    pub fn new(points: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        Self::build(points, values, None)
    }

    pub fn with_weights(points: Vec<Point>, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::build(points, values, Some(weights))
    }

    fn build(points: Vec<Point>, values: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "points and values",
                left: points.len(),
                right: values.len(),
            });
        }
        if points.is_empty() {
            return Err(Error::InvalidData("data set is empty".into()));
        }
        let d = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        if let Some(w) = &weights {
            if w.len() != points.len() {
                return Err(Error::LengthMismatch {
                    what: "points and weights",
                    left: points.len(),
                    right: w.len(),
                });
            }
            if let Some(bad) = w.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
                return Err(Error::InvalidData(format!(
                    "importance weights must be positive and finite, found {bad}"
                )));
            }
        }
        Ok(Self {
            points,
            values,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Values scaled by the importance weights, or the raw values when the
    /// set carries no weights.
    pub fn weighted_values(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => self.values.iter().zip(w).map(|(f, w)| f * w).collect(),
            None => self.values.clone(),
        }
    }

    /// Same points and weights with the values mapped through `map`.
    pub fn map_values(&self, map: impl Fn(f64) -> f64) -> Self {
        Self {
            points: self.points.clone(),
            values: self.values.iter().map(|&v| map(v)).collect(),
            weights: self.weights.clone(),
        }
    }
}
