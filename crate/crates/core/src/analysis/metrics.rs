use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVectorView};

use crate::error::{Error, Result};
use crate::model::NearSeparableInstance;
use crate::num;

/// Mean-removed spectral angle scaled to `[0, 100]`.
pub fn mrsa(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(crate::error::invalid("mrsa needs two vectors of equal nonzero length"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut dot, mut nx, mut ny) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        dot += a * b;
        nx += a * a;
        ny += b * b;
    }
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ConstantVector);
    }
    let cos = (dot / (num::sqrt(nx) * num::sqrt(ny))).clamp(-1.0, 1.0);
    Ok(100.0 / core::f64::consts::PI * num::acos(cos))
}

fn mrsa_cols(a: DVectorView<f64>, b: DVectorView<f64>) -> Result<f64> {
    mrsa(a.as_slice(), b.as_slice())
}

/// Minimum-cost perfect matching on a square cost matrix (Kuhn–Munkres with
/// potentials). Returns `assign[row] = column` and the total cost.
pub fn min_cost_assignment(cost: &DMatrix<f64>) -> (Vec<usize>, f64) {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based arrays; p[j] is the row matched to column j.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost[(i, assign[i])]).sum();
    (assign, total)
}

/// How well an extracted index set matches the true endmembers.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryMetrics {
    /// `|K ∩ pure_indices| / r`.
    pub fraction_identified: f64,
    /// `max_k min_{j in K} ||W(:,k) - X_noisy(:,j)||_2`.
    pub max_min_error: f64,
    /// MRSA of each endmember against its matched extracted column.
    pub mrsa_per_endmember: Vec<f64>,
    /// Extracted column matched to each endmember (`None` when `|K| < r`).
    pub matching: Vec<Option<usize>>,
    pub mrsa_mean: f64,
}

/// MRSA of every endmember (rows) against every candidate column.
/// Pairs involving a constant vector score 100.
pub fn mrsa_matrix(w: &DMatrix<f64>, candidates: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(w.ncols(), candidates.ncols(), |k, j| {
        mrsa_cols(w.column(k), candidates.column(j)).unwrap_or(100.0)
    })
}

/// Matches endmembers to candidate columns minimizing total MRSA.
/// Returns `(matching, per-endmember MRSA)`; unmatched endmembers score 100.
pub fn match_endmembers(w: &DMatrix<f64>, candidates: &DMatrix<f64>) -> (Vec<Option<usize>>, Vec<f64>) {
    let r = w.ncols();
    let k = candidates.ncols();
    let cost = mrsa_matrix(w, candidates);
    let size = r.max(k);
    let padded = DMatrix::from_fn(size, size, |i, j| {
        if i < r && j < k {
            cost[(i, j)]
        } else if i < r {
            100.0
        } else {
            0.0
        }
    });
    let (assign, _) = min_cost_assignment(&padded);
    let mut matching = Vec::with_capacity(r);
    let mut scores = Vec::with_capacity(r);
    for i in 0..r {
        let j = assign[i];
        if j < k {
            matching.push(Some(j));
            scores.push(cost[(i, j)]);
        } else {
            matching.push(None);
            scores.push(100.0);
        }
    }
    (matching, scores)
}

/// Scores an extracted index set against a synthetic instance.
pub fn recovery_metrics(indices: &[usize], instance: &NearSeparableInstance) -> RecoveryMetrics {
    let r = instance.r();
    let hits = indices.iter().filter(|j| instance.pure_indices.contains(j)).count();
    let x = &instance.x_noisy;
    let w = &instance.w;
    let max_min_error = (0..r)
        .map(|k| {
            indices
                .iter()
                .map(|&j| (w.column(k) - x.column(j)).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let extracted = crate::linalg::select_columns(x, indices);
    let (matching, mrsa_per_endmember) = match_endmembers(w, &extracted);
    let matching = matching.into_iter().map(|m| m.map(|j| indices[j])).collect();
    let mrsa_mean = if r == 0 { 0.0 } else { mrsa_per_endmember.iter().sum::<f64>() / r as f64 };
    RecoveryMetrics {
        fraction_identified: hits as f64 / r as f64,
        max_min_error,
        mrsa_per_endmember,
        matching,
        mrsa_mean,
    }
}
