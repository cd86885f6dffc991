//! Small dense linear algebra helpers shared by the algorithm modules.

use alloc::vec::Vec;
use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::num;

pub(crate) fn ensure_finite(x: &DMatrix<f64>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Euclidean norm of every column.
pub fn column_norms(x: &DMatrix<f64>) -> Vec<f64> {
    x.column_iter().map(|c| num::sqrt(c.norm_squared())).collect()
}

/// Largest column norm, i.e. `max_j ||x(:,j)||_2`.
pub fn max_column_norm(x: &DMatrix<f64>) -> f64 {
    column_norms(x).into_iter().fold(0.0, f64::max)
}

/// Copies the listed columns, in order, into a new matrix.
pub fn select_columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), cols.len(), |i, k| x[(i, cols[k])])
}

/// `(a + a^T) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Cholesky factorization with a single diagonal jitter retry of
/// `1e-12 * trace(a) / n`.
pub fn cholesky_with_jitter(a: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    let n = a.nrows();
    let sym = symmetrize(a);
    if let Some(c) = Cholesky::new(sym.clone()) {
        return Ok(c);
    }
    let jitter = 1e-12 * sym.trace() / n as f64;
    let mut shifted = sym;
    for i in 0..n {
        shifted[(i, i)] += jitter;
    }
    Cholesky::new(shifted).ok_or(Error::Cholesky { dim: n })
}

/// Singular values, sorted nonincreasing.
pub fn singular_values(x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = nalgebra::SVD::try_new(x.clone(), false, false, f64::EPSILON, 0)
        .ok_or(Error::SvdFailed)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Numerical rank with relative cutoff `rel_tol * sigma_1`.
pub fn numerical_rank(x: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    let s = singular_values(x)?;
    let cutoff = s.first().copied().unwrap_or(0.0) * rel_tol;
    Ok(s.iter().filter(|&&v| v > cutoff).count())
}
