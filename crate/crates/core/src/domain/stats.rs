//! Sample statistics. Covariances use the unbiased `n - 1` normalization
//! throughout.

use crate::error::{Error, Result};

pub fn mean(a: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    Ok(a.iter().sum::<f64>() / a.len() as f64)
}

/// Unbiased sample covariance.
pub fn sample_cov(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "covariance operands",
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: a.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    Ok(s / (n - 1.0))
}

pub fn sample_var(a: &[f64]) -> Result<f64> {
    sample_cov(a, a)
}

/// Mean and standard error of the mean. A single value has standard error 0.
pub(crate) fn mean_and_stderr(a: &[f64]) -> (f64, f64) {
    let n = a.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = a.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (m, 0.0);
    }
    let v = a.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
    (m, (v / n as f64).sqrt())
}
