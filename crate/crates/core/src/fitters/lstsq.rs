//! Minimum-norm least squares through an orthogonal factorization.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};

/// Singular values below `RCOND * max(rows, cols) * sigma_max` count as zero.
const RCOND: f64 = f64::EPSILON;

const SVD_MAX_ITER: usize = 500;

/// A tall system whose `R` diagonal stays above this fraction of its largest
/// entry is solved by back substitution; otherwise through the SVD.
const FULL_RANK_RATIO: f64 = 1e-8;

/// Solve `min |phi b - y|^2 + ridge |b|^2`, returning the minimum-norm
/// minimizer when the system is rank deficient.
///
/// Tall systems are reduced with a Householder QR first; the SVD only sees
/// the square `R` factor, and only when `R` looks rank deficient. If the SVD fails to converge the solve is
/// retried once with a ridge of `1e-10 * trace(phi^T phi) / cols`.
pub fn solve(phi: DMatrix<f64>, y: DVector<f64>, ridge: f64) -> Result<DVector<f64>> {
    if phi.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            what: "design rows and targets",
            left: phi.nrows(),
            right: y.len(),
        });
    }
    match solve_once(&phi, &y, ridge) {
        Some(b) => Ok(b),
        None => {
            let cols = phi.ncols().max(1) as f64;
            let fallback = 1e-10 * phi.iter().map(|v| v * v).sum::<f64>() / cols;
            solve_once(&phi, &y, ridge + fallback)
                .ok_or_else(|| Error::Fit("singular value decomposition did not converge".into()))
        }
    }
}

fn solve_once(phi: &DMatrix<f64>, y: &DVector<f64>, ridge: f64) -> Option<DVector<f64>> {
    let (a, b) = if ridge > 0.0 {
        augment(phi, y, ridge)
    } else {
        (phi.clone(), y.clone())
    };
    let (rows, cols) = a.shape();
    let beta = if rows > cols {
        let qr = a.qr();
        let mut qty = b;
        qr.q_tr_mul(&mut qty);
        let r = qr.r();
        let rhs = qty.rows(0, cols).into_owned();
        let diag = r.diagonal().map(f64::abs);
        if diag.min() > FULL_RANK_RATIO * diag.max() {
            r.solve_upper_triangular(&rhs)
        } else {
            pinv_solve(r, &rhs, rows.max(cols))
        }
    } else {
        pinv_solve(a, &b, rows.max(cols))
    }?;
    beta.iter().all(|v| v.is_finite()).then_some(beta)
}

fn augment(phi: &DMatrix<f64>, y: &DVector<f64>, ridge: f64) -> (DMatrix<f64>, DVector<f64>) {
    let (rows, cols) = phi.shape();
    let mut a = DMatrix::zeros(rows + cols, cols);
    a.rows_mut(0, rows).copy_from(phi);
    let s = ridge.sqrt();
    for j in 0..cols {
        a[(rows + j, j)] = s;
    }
    let mut b = DVector::zeros(rows + cols);
    b.rows_mut(0, rows).copy_from(y);
    (a, b)
}

fn pinv_solve(a: DMatrix<f64>, b: &DVector<f64>, scale: usize) -> Option<DVector<f64>> {
    let svd = SVD::try_new(a, true, true, f64::EPSILON, SVD_MAX_ITER)?;
    let smax = svd.singular_values.max();
    let cutoff = (RCOND * scale as f64 * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, cutoff).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_overdetermined_fit() {
        // y = 3 + 2x
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let phi = DMatrix::from_fn(5, 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        let y = DVector::from_iterator(5, x.iter().map(|v| 3.0 + 2.0 * v));
        let b = solve(phi, y, 0.0).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn underdetermined_gives_minimum_norm() {
        // one equation b0 + b1 = 2 -> minimum norm (1, 1)
        let phi = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = solve(phi, DVector::from_vec(vec![2.0]), 0.0).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_columns_split_evenly() {
        let x = [0.5, 1.0, 1.5, 2.0];
        let phi = DMatrix::from_fn(4, 3, |i, j| if j == 0 { 1.0 } else { x[i] });
        let y = DVector::from_iterator(4, x.iter().map(|v| 4.0 * v));
        let b = solve(phi, y, 0.0).unwrap();
        assert!(b[0].abs() < 1e-10);
        assert!((b[1] - 2.0).abs() < 1e-10 && (b[2] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn ridge_shrinks() {
        let phi = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 1.0]);
        // minimizer of 2(b-1)^2 + b^2 is 2/3
        let b = solve(phi, y, 1.0).unwrap();
        assert!((b[0] - 2.0 / 3.0).abs() < 1e-12);
    }
}
