//! Successive projection algorithm.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::linalg;
use crate::num;

/// A residual column whose norm is at most `ZERO_TOL` times the initial
/// largest column norm counts as zero and stops the extraction.
pub const ZERO_TOL: f64 = 1e-12;

/// Output of [`spa`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    /// Selected columns in selection order; pairwise distinct.
    pub indices: Vec<usize>,
    /// `||R(:,p)||_2` of each selected column at the time it was selected.
    pub residual_norms: Vec<f64>,
    /// The residual vanished before `p` columns were selected.
    pub terminated_early: bool,
}

/// Greedily picks the column of largest residual norm (smallest index on
/// ties), projects every column onto the orthogonal complement of it, and
/// repeats until `p` columns are selected or the residual is numerically zero.
///
/// The residual matrix is deflated explicitly and its column norms are
/// recomputed at each step.
pub fn spa(x: &DMatrix<f64>, p: usize) -> Result<ExtractionResult> {
    let (m, n) = x.shape();
    if p == 0 || p > m.min(n) {
        return Err(invalid(alloc::format!("p = {p} must lie in 1..={}", m.min(n))));
    }
    linalg::ensure_finite(x)?;

    let mut r = x.clone();
    let mut selected = alloc::vec![false; n];
    let mut indices = Vec::with_capacity(p);
    let mut residual_norms = Vec::with_capacity(p);
    let mut terminated_early = false;
    let mut initial_max = None;

    while indices.len() < p {
        let mut best = None::<(usize, f64)>;
        for (j, col) in r.column_iter().enumerate() {
            if selected[j] {
                continue;
            }
            let v = col.norm_squared();
            match best {
                Some((_, b)) if v <= b => {}
                _ => best = Some((j, v)),
            }
        }
        let Some((jbest, sq)) = best else {
            terminated_early = true;
            break;
        };
        let norm = num::sqrt(sq);
        let init = *initial_max.get_or_insert(norm);
        if norm <= ZERO_TOL * init || norm == 0.0 {
            terminated_early = true;
            break;
        }
        selected[jbest] = true;
        indices.push(jbest);
        residual_norms.push(norm);

        // R <- (I - u u^T) R with u the normalized selected residual.
        let u = r.column(jbest) / norm;
        let proj = u.transpose() * &r;
        r.ger(-1.0, &u, &proj.transpose(), 1.0);
    }

    Ok(ExtractionResult { indices, residual_norms, terminated_early })
}
