//! Preconditioners for SPA and the preconditioned pipelines.
//!
//! All three preconditioners start from the same rank-`r` truncated SVD
//! `X ~ U_r S_r V_r^T` and return an `r x m` matrix `Q`:
//!
//! * [`sdp_precondition`]: `Q = P U_r^T` with `A = P^T P` the enclosing
//!   ellipsoid of the columns of `S_r V_r^T`;
//! * [`prewhiten`]: `Q = S_r^{-1} U_r^T`, so that `Q X = V_r^T`;
//! * [`spa_precondition`]: pre-whitening of the `p` columns selected by SPA.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, cholesky_with_jitter};
use crate::mvee::{active_set_solve, solve_mvee, MveeOptions};
use crate::spa::{spa, ExtractionResult};

/// Singular values at or below `SVD_CUTOFF * sigma_1` count as zero.
pub const SVD_CUTOFF: f64 = 1e-10;

/// `X ~ U S V^T` restricted to the leading `r` singular triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// `m x r`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Nonincreasing singular values.
    pub s: DVector<f64>,
    /// `n x r`, orthonormal columns.
    pub v: DMatrix<f64>,
}

impl TruncatedSvd {
    /// `U_r S_r V_r^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.s) * self.v.transpose()
    }

    /// `S_r V_r^T`, the data expressed in the `U_r` basis.
    pub fn reduced(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.s) * self.v.transpose()
    }

    /// Fails when a kept singular value is below `SVD_CUTOFF * s_1`.
    pub fn check_rank(&self) -> Result<()> {
        let s1 = self.s[0];
        let found = self.s.iter().filter(|&&v| v > SVD_CUTOFF * s1).count();
        if found < self.s.len() {
            Err(Error::RankDeficient { needed: self.s.len(), found })
        } else {
            Ok(())
        }
    }
}

/// Rank-`r` truncated SVD.
pub fn truncated_svd(x: &DMatrix<f64>, r: usize) -> Result<TruncatedSvd> {
    let (m, n) = x.shape();
    if r == 0 || r > m.min(n) {
        return Err(invalid(alloc::format!("r = {r} must lie in 1..={}", m.min(n))));
    }
    linalg::ensure_finite(x)?;
    let svd = nalgebra::SVD::try_new(x.clone(), true, true, f64::EPSILON, 0).ok_or(Error::SvdFailed)?;
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::SvdFailed),
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let order = &order[..r];
    let s = DVector::from_iterator(r, order.iter().map(|&i| svd.singular_values[i]));
    let u_r = linalg::select_columns(&u, order);
    let v_r = DMatrix::from_fn(n, r, |j, k| vt[(order[k], j)]);
    Ok(TruncatedSvd { u: u_r, s, v: v_r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreconditionerKind {
    Sdp,
    PreWhiten,
    SpaBased,
    Identity,
}

/// A linear map applied to the data before SPA.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    /// `rank x m` (or `m x m` for the identity).
    pub q: DMatrix<f64>,
    pub kind: PreconditionerKind,
    pub rank: usize,
    /// `(U_r, S_r)` of the SVD the preconditioner was built from.
    pub svd_basis: Option<(DMatrix<f64>, DVector<f64>)>,
    /// Certified approximation ratio of the ellipsoid (SDP only).
    pub cert: Option<f64>,
    /// Columns the SPA-based preconditioner whitened.
    pub selected: Option<Vec<usize>>,
}

impl Preconditioner {
    pub fn identity(m: usize) -> Self {
        Self {
            q: DMatrix::identity(m, m),
            kind: PreconditionerKind::Identity,
            rank: m,
            svd_basis: None,
            cert: None,
            selected: None,
        }
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.q * x
    }
}

/// Options for the ellipsoid-based preconditioner.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SdpOptions {
    pub mvee: MveeOptions,
    /// Use the active-set outer loop instead of a full solve.
    pub active_set: bool,
}

/// Ellipsoid-based preconditioner: `Q = P U_r^T` with `A = P^T P`.
pub fn sdp_precondition(x: &DMatrix<f64>, r: usize, opts: &SdpOptions) -> Result<Preconditioner> {
    let svd = truncated_svd(x, r)?;
    svd.check_rank()?;
    let y = svd.reduced();
    let sol = if opts.active_set {
        active_set_solve(&y, &opts.mvee)?
    } else {
        solve_mvee(&y, &opts.mvee)?
    };
    let chol = cholesky_with_jitter(&sol.a)?;
    // A = L L^T = P^T P with P = L^T
    let p = chol.l().transpose();
    let q = p * svd.u.transpose();
    Ok(Preconditioner {
        q,
        kind: PreconditionerKind::Sdp,
        rank: r,
        svd_basis: Some((svd.u, svd.s)),
        cert: Some(sol.alpha_cert),
        selected: None,
    })
}

fn whiten_from(svd: TruncatedSvd, r: usize) -> Result<Preconditioner> {
    svd.check_rank()?;
    let inv = svd.s.map(|v| 1.0 / v);
    let q = DMatrix::from_diagonal(&inv) * svd.u.transpose();
    Ok(Preconditioner {
        q,
        kind: PreconditionerKind::PreWhiten,
        rank: r,
        svd_basis: Some((svd.u, svd.s)),
        cert: None,
        selected: None,
    })
}

/// Noise filtering and pre-whitening: `Q = S_r^{-1} U_r^T`.
pub fn prewhiten(x: &DMatrix<f64>, r: usize) -> Result<Preconditioner> {
    whiten_from(truncated_svd(x, r)?, r)
}

/// Pre-whitening of the `p` columns chosen by SPA.
pub fn spa_precondition(x: &DMatrix<f64>, r: usize, p: usize) -> Result<Preconditioner> {
    spa_precondition_depth(x, r, p, 1)
}

/// SPA-based preconditioning applied `depth` times: each round selects the
/// columns with SPA run on the data preconditioned by the previous round.
pub fn spa_precondition_depth(x: &DMatrix<f64>, r: usize, p: usize, depth: usize) -> Result<Preconditioner> {
    let (m, n) = x.shape();
    if r == 0 || p < r || p > m.min(n) {
        return Err(invalid(alloc::format!("need 1 <= r <= p <= min(m, n), got r = {r}, p = {p}")));
    }
    if depth == 0 {
        return Err(invalid("depth must be at least one"));
    }
    let mut selected = extract(x, p)?;
    let mut prec = whiten_selected(x, &selected, r)?;
    for _ in 1..depth {
        let qx = prec.apply(x);
        let k = qx.nrows().min(n).min(p);
        selected = extract(&qx, k)?;
        if selected.len() < r {
            return Err(Error::EarlyTermination { needed: r, found: selected.len() });
        }
        prec = whiten_selected(x, &selected, r)?;
    }
    Ok(prec)
}

fn extract(x: &DMatrix<f64>, p: usize) -> Result<Vec<usize>> {
    let res = spa(x, p)?;
    Ok(res.indices)
}

fn whiten_selected(x: &DMatrix<f64>, selected: &[usize], r: usize) -> Result<Preconditioner> {
    if selected.len() < r {
        return Err(Error::EarlyTermination { needed: r, found: selected.len() });
    }
    let sub = linalg::select_columns(x, selected);
    let mut prec = whiten_from(truncated_svd(&sub, r)?, r)?;
    prec.kind = PreconditionerKind::SpaBased;
    prec.selected = Some(selected.to_vec());
    Ok(prec)
}

/// Which preconditioner to run in front of SPA.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Plain SPA.
    Identity,
    Sdp(SdpOptions),
    PreWhiten,
    SpaBased { p: usize, depth: usize },
}

/// Builds the preconditioner requested by `method`.
pub fn build_preconditioner(x: &DMatrix<f64>, r: usize, method: &Method) -> Result<Preconditioner> {
    match method {
        Method::Identity => Ok(Preconditioner::identity(x.nrows())),
        Method::Sdp(opts) => sdp_precondition(x, r, opts),
        Method::PreWhiten => prewhiten(x, r),
        Method::SpaBased { p, depth } => spa_precondition_depth(x, r, *p, *depth),
    }
}

/// Runs SPA on `Q X` and returns indices into the columns of `x`.
///
/// `Q X` is formed explicitly even where it equals a factor of the SVD, so
/// identical data columns stay bitwise identical and ties resolve by index.
pub fn preconditioned_spa(x: &DMatrix<f64>, r: usize, method: &Method) -> Result<ExtractionResult> {
    linalg::ensure_finite(x)?;
    match method {
        Method::Identity => spa(x, r),
        _ => {
            let prec = build_preconditioner(x, r, method)?;
            spa(&prec.apply(x), r)
        }
    }
}
