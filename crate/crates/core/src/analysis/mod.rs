//! Closed forms, robustness bounds and recovery metrics.

mod bounds;
mod metrics;

pub use bounds::*;
pub use metrics::*;

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::linalg;
use crate::num;

/// `sigma_max / sigma_min`; `+inf` when `sigma_min <= eps * sigma_max` or
/// the matrix is zero.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let Ok(s) = linalg::singular_values(m) else {
        return f64::INFINITY;
    };
    let (Some(&hi), Some(&lo)) = (s.first(), s.last()) else {
        return f64::INFINITY;
    };
    if hi == 0.0 || lo <= f64::EPSILON * hi {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Largest `lambda_1 / lambda_r` over nonincreasing `lambda >= 0` with
/// `sum lambda <= beta` and `prod lambda >= gamma`:
///
/// ```text
/// kappa* = (1 + s) / (1 - s),   s = sqrt(1 - gamma (r / beta)^r).
/// ```
///
/// Evaluated as `(1 + s)^2 / (gamma (r/beta)^r)` to avoid cancellation.
pub fn kappa_star(r: usize, beta: f64, gamma: f64) -> Result<f64> {
    if r < 2 {
        return Err(invalid("kappa_star needs r >= 2"));
    }
    if !(beta >= r as f64) || !beta.is_finite() {
        return Err(invalid("kappa_star needs beta >= r"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid("kappa_star needs 0 < gamma <= 1"));
    }
    let t = gamma * num::powf(r as f64 / beta, r as f64);
    if t >= 1.0 {
        return Ok(1.0);
    }
    let s = num::sqrt(1.0 - t);
    Ok((1.0 + s) * (1.0 + s) / t)
}

/// Second moment of a Dirichlet vector and its eigenvalue bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletMoment {
    /// `E[h h^T] = (D + alpha alpha^T) / (alpha_0 (alpha_0 + 1))`, in the
    /// coordinate order of the input.
    pub phi: DMatrix<f64>,
    /// `(alpha_max + ||alpha||^2) / (alpha_0 (alpha_0 + 1)) >= lambda_max`.
    pub u_bound: f64,
    /// `alpha_min / (alpha_0 (alpha_0 + 1)) <= lambda_min`.
    pub l_bound: f64,
    /// The input was not nonincreasing and the bounds used the sorted order.
    pub sorted_internally: bool,
}

pub fn dirichlet_second_moment(alpha: &[f64]) -> Result<DirichletMoment> {
    if alpha.is_empty() || alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(invalid("Dirichlet concentrations must be positive"));
    }
    let r = alpha.len();
    let a0: f64 = alpha.iter().sum();
    let z = a0 * (a0 + 1.0);
    let phi = DMatrix::from_fn(r, r, |i, j| {
        let d = if i == j { alpha[i] } else { 0.0 };
        (d + alpha[i] * alpha[j]) / z
    });
    let mut sorted: Vec<f64> = alpha.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let sorted_internally = sorted.as_slice() != alpha;
    let norm2: f64 = alpha.iter().map(|a| a * a).sum();
    Ok(DirichletMoment {
        phi,
        u_bound: (sorted[0] + norm2) / z,
        l_bound: sorted[r - 1] / z,
        sorted_internally,
    })
}
