//! Minimum-volume origin-centred ellipsoid enclosing a point set.
//!
//! The primal problem is
//!
//! ```text
//! max det(A)  s.t.  x_j^T A x_j <= 1 for all j,  A symmetric PSD,
//! ```
//!
//! and we work on its dual, the D-optimal design problem
//! `max_u log det M(u)` over the simplex with `M(u) = sum_j u_j x_j x_j^T`.
//! Any design `u` yields a feasible ellipsoid `A = M(u)^{-1} / gamma(u)` with
//! `gamma(u) = max_j x_j^T M(u)^{-1} x_j`, and weak duality
//! (`det(A*) <= r^{-r} / det M(u)`) certifies
//!
//! ```text
//! det(A) >= (r / gamma(u))^r det(A*).
//! ```
//!
//! The ascent is Fedorov–Wynn / Khachiyan with Wolfe–Atwood away steps and
//! exact line search; `M(u)^{-1}` and the leverages `x_j^T M(u)^{-1} x_j`
//! are maintained by Sherman–Morrison updates and refactored every `50 r`
//! steps.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, symmetrize};
use crate::num;
use crate::spa::spa;

/// Slack allowed on `x_j^T A x_j <= 1` when checking feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MveeOptions {
    /// Stop once the certified ratio `(r/gamma)^r` reaches this value.
    pub alpha_target: f64,
    pub max_iters: usize,
    /// Record `(iter, logdet, gamma, alpha_cert)` after every step.
    pub trace: bool,
}

impl Default for MveeOptions {
    fn default() -> Self {
        Self { alpha_target: 0.99, max_iters: 200_000, trace: false }
    }
}

impl MveeOptions {
    pub fn with_alpha(alpha_target: f64) -> Self {
        Self { alpha_target, ..Self::default() }
    }
}

/// One row of the optional iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iter: usize,
    pub logdet: f64,
    pub gamma: f64,
    pub alpha_cert: f64,
}

/// A feasible ellipsoid together with the design that certifies it.
#[derive(Debug, Clone)]
pub struct EllipsoidSolution {
    /// Shape matrix, `x^T A x <= 1` on the ellipsoid.
    pub a: DMatrix<f64>,
    /// Design weights on the simplex.
    pub u: Vec<f64>,
    /// `max_j x_j^T M(u)^{-1} x_j`.
    pub gamma: f64,
    /// `(r / gamma)^r`; `det(A) >= alpha_cert * det(A*)`.
    pub alpha_cert: f64,
    /// `log det M(u)`.
    pub logdet: f64,
    pub iterations: usize,
    /// Outer rounds of the active-set method (0 for a direct solve).
    pub outer_iterations: usize,
    pub converged: bool,
    /// Columns with `u_j > 0`.
    pub active_set: Vec<usize>,
    pub trace: Vec<TracePoint>,
}

impl EllipsoidSolution {
    pub fn det_a(&self) -> f64 {
        self.a.determinant()
    }

    /// `log det A = -r log gamma - log det M(u)`.
    pub fn log_det_a(&self) -> f64 {
        let r = self.a.nrows() as f64;
        -r * num::ln(self.gamma) - self.logdet
    }
}

fn certificate(r: usize, gamma: f64) -> f64 {
    let r = r as f64;
    num::exp(r * num::ln(r / gamma)).min(1.0)
}

fn validate(x: &DMatrix<f64>, opts: &MveeOptions) -> Result<()> {
    let (r, n) = x.shape();
    if r == 0 || n < r {
        return Err(invalid(alloc::format!("need n >= r >= 1, got r = {r}, n = {n}")));
    }
    if !(opts.alpha_target > 0.0 && opts.alpha_target < 1.0) {
        return Err(invalid("alpha_target must lie in (0, 1)"));
    }
    linalg::ensure_finite(x)
}

fn rank_error(x: &DMatrix<f64>) -> Error {
    let found = linalg::numerical_rank(x, 1e-12).unwrap_or(0);
    Error::RankDeficient { needed: x.nrows(), found }
}

fn design_matrix(x: &DMatrix<f64>, u: &[f64]) -> DMatrix<f64> {
    let r = x.nrows();
    let mut m = DMatrix::zeros(r, r);
    for (j, &w) in u.iter().enumerate() {
        if w > 0.0 {
            let c = x.column(j);
            m.syger(w, &c, &c, 1.0);
        }
    }
    m.fill_upper_triangle_with_lower_triangle();
    m
}

fn leverages(x: &DMatrix<f64>, minv: &DMatrix<f64>) -> Vec<f64> {
    let g = minv * x;
    x.column_iter().zip(g.column_iter()).map(|(a, b)| a.dot(&b)).collect()
}

fn factor(m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let scale = m.diagonal().iter().fold(0.0f64, |a, &v| a.max(v));
    let chol = Cholesky::new(m)?;
    let floor = 1e-13 * scale;
    chol.l_dirty().diagonal().iter().all(|&v| v * v > floor).then_some(chol)
}

/// Returns `(gamma, alpha)` for the design `u`:
/// `gamma = max_j x_j^T M(u)^{-1} x_j`, `alpha = (r / gamma)^r`.
pub fn alpha_certificate(u: &[f64], x: &DMatrix<f64>) -> Result<(f64, f64)> {
    let (r, n) = x.shape();
    if u.len() != n {
        return Err(invalid("design length must equal the number of columns"));
    }
    if u.iter().any(|&v| !(v >= 0.0)) {
        return Err(invalid("design weights must be nonnegative"));
    }
    let s: f64 = u.iter().sum();
    if num::abs(s - 1.0) > 1e-9 {
        return Err(invalid("design weights must sum to one"));
    }
    linalg::ensure_finite(x)?;
    let chol = factor(design_matrix(x, u)).ok_or(Error::SingularDesign)?;
    let minv = chol.inverse();
    let gamma = leverages(x, &minv).into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !gamma.is_finite() {
        return Err(Error::SingularDesign);
    }
    Ok((gamma, certificate(r, gamma)))
}

/// Working state of the design ascent.
struct Design<'a> {
    x: &'a DMatrix<f64>,
    u: Vec<f64>,
    minv: DMatrix<f64>,
    g: Vec<f64>,
    logdet: f64,
}

impl<'a> Design<'a> {
    fn new(x: &'a DMatrix<f64>, u: Vec<f64>) -> Option<Self> {
        let r = x.nrows();
        let mut d = Self { x, u, minv: DMatrix::zeros(r, r), g: Vec::new(), logdet: 0.0 };
        d.refactor().then_some(d)
    }

    fn refactor(&mut self) -> bool {
        let Some(chol) = factor(design_matrix(self.x, &self.u)) else {
            return false;
        };
        self.logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|&v| num::ln(v)).sum::<f64>();
        self.minv = chol.inverse();
        self.g = leverages(self.x, &self.minv);
        true
    }

    fn gamma(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (j, &v) in self.g.iter().enumerate() {
            if v > best.1 {
                best = (j, v);
            }
        }
        best
    }

    fn min_on_support(&self) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, &v) in self.g.iter().enumerate() {
            if self.u[j] > 0.0 && v < best.1 {
                best = (j, v);
            }
        }
        best
    }

    /// `u <- (1 - tau) u + tau e_j`. Returns false on numerical breakdown.
    fn step(&mut self, j: usize, tau: f64, drop: bool) -> bool {
        let gj = self.g[j];
        let c = tau / (1.0 - tau);
        let denom = 1.0 + c * gj;
        if !(denom > 1e-12) || !(1.0 - tau > 0.0) {
            return false;
        }
        let xj = self.x.column(j);
        let v: DVector<f64> = &self.minv * xj;
        let w = self.x.tr_mul(&v);
        let scale = 1.0 / (1.0 - tau);
        let coef = c / denom;
        self.minv.ger(-coef, &v, &v, 1.0);
        self.minv *= scale;
        for (gi, wi) in self.g.iter_mut().zip(w.iter()) {
            *gi = (*gi - coef * wi * wi) * scale;
        }
        for ui in self.u.iter_mut() {
            *ui *= 1.0 - tau;
        }
        if drop {
            self.u[j] = 0.0;
        } else {
            self.u[j] += tau;
        }
        let r = self.x.nrows() as f64;
        self.logdet += r * num::ln(1.0 - tau) + num::ln(denom);
        true
    }
}

/// Optimal step towards vertex `j` along `(1 - tau) u + tau e_j`:
/// `tau = (g - r) / (r (g - 1))`.
fn line_search(g: f64, r: f64) -> f64 {
    (g - r) / (r * (g - 1.0))
}

fn ascend(design: &mut Design<'_>, opts: &MveeOptions, trace: &mut Vec<TracePoint>) -> (usize, bool) {
    let r = design.x.nrows();
    let rf = r as f64;
    let refactor_every = 50 * r;
    let mut since_refactor = 0;
    let mut iter = 0;
    loop {
        let (jmax, gamma) = design.gamma();
        let alpha = certificate(r, gamma);
        if opts.trace {
            trace.push(TracePoint { iter, logdet: design.logdet, gamma, alpha_cert: alpha });
        }
        if alpha >= opts.alpha_target {
            if since_refactor == 0 {
                return (iter, true);
            }
            // confirm on exact quantities before stopping
            if !design.refactor() {
                return (iter, false);
            }
            since_refactor = 0;
            let (_, g) = design.gamma();
            if certificate(r, g) >= opts.alpha_target {
                return (iter, true);
            }
            continue;
        }
        if iter >= opts.max_iters {
            return (iter, false);
        }
        let (jmin, gmin) = design.min_on_support();
        let up = gamma / rf - 1.0;
        let down = 1.0 - gmin / rf;
        let ok = if up >= down || jmin == usize::MAX {
            design.step(jmax, line_search(gamma, rf), false)
        } else {
            let uj = design.u[jmin];
            let floor = -uj / (1.0 - uj);
            let tau = if gmin > 1.0 { line_search(gmin, rf) } else { f64::NEG_INFINITY };
            if tau > floor {
                design.step(jmin, tau, false)
            } else {
                design.step(jmin, floor, true)
            }
        };
        iter += 1;
        since_refactor += 1;
        if !ok || since_refactor >= refactor_every {
            if !design.refactor() {
                return (iter, false);
            }
            since_refactor = 0;
        }
    }
}

fn finish(design: &Design<'_>, iterations: usize, converged: bool, trace: Vec<TracePoint>) -> EllipsoidSolution {
    let r = design.x.nrows();
    let (_, gamma) = design.gamma();
    let a = symmetrize(&(&design.minv / gamma));
    let active_set = design.u.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(j, _)| j).collect();
    EllipsoidSolution {
        a,
        u: design.u.clone(),
        gamma,
        alpha_cert: certificate(r, gamma),
        logdet: design.logdet,
        iterations,
        outer_iterations: 0,
        converged,
        active_set,
        trace,
    }
}

/// Uniform weights on the SPA-selected columns, or on all columns if those
/// do not give a nonsingular design.
fn initial_design(x: &DMatrix<f64>) -> Option<Design<'_>> {
    let (r, n) = x.shape();
    if let Ok(res) = spa(x, r) {
        if res.indices.len() == r {
            let mut u = vec![0.0; n];
            for &j in &res.indices {
                u[j] = 1.0 / r as f64;
            }
            if let Some(d) = Design::new(x, u) {
                return Some(d);
            }
        }
    }
    Design::new(x, vec![1.0 / n as f64; n])
}

fn solve_from(x: &DMatrix<f64>, design: Option<Design<'_>>, opts: &MveeOptions) -> Result<EllipsoidSolution> {
    let mut design = match design {
        Some(d) => d,
        None => return Err(rank_error(x)),
    };
    let mut trace = Vec::new();
    let (iters, converged) = ascend(&mut design, opts, &mut trace);
    if !design.refactor() {
        return Err(rank_error(x));
    }
    Ok(finish(&design, iters, converged, trace))
}

/// Solves the enclosing-ellipsoid problem for the columns of the `r x n`
/// matrix `x` to a certified `alpha_target` approximation.
///
/// With `n == r` the exact solution `(X X^T)^{-1}` is returned directly.
pub fn solve_mvee(x: &DMatrix<f64>, opts: &MveeOptions) -> Result<EllipsoidSolution> {
    validate(x, opts)?;
    let (r, n) = x.shape();
    if n == r {
        let chol = factor(x * x.transpose()).ok_or_else(|| rank_error(x))?;
        let a = symmetrize(&chol.inverse());
        let u = vec![1.0 / r as f64; r];
        let design = Design::new(x, u).ok_or_else(|| rank_error(x))?;
        let (_, gamma) = design.gamma();
        let trace = if opts.trace {
            vec![TracePoint { iter: 0, logdet: design.logdet, gamma, alpha_cert: 1.0 }]
        } else {
            Vec::new()
        };
        return Ok(EllipsoidSolution {
            a,
            u: design.u.clone(),
            gamma: r as f64,
            alpha_cert: 1.0,
            logdet: design.logdet,
            iterations: 0,
            outer_iterations: 0,
            converged: true,
            active_set: (0..r).collect(),
            trace,
        });
    }
    solve_from(x, initial_design(x), opts)
}

/// Active-set variant: solve on a working set seeded by SPA, add the most
/// violated constraints, and repeat until every column satisfies
/// `x_j^T A x_j <= 1 + 1e-9`. At most `r` columns enter per round.
pub fn active_set_solve(x: &DMatrix<f64>, opts: &MveeOptions) -> Result<EllipsoidSolution> {
    validate(x, opts)?;
    let (r, n) = x.shape();
    let seedset = spa(x, r).map(|s| s.indices).unwrap_or_default();
    if seedset.len() < r {
        return Err(rank_error(x));
    }
    let mut working = seedset;
    let mut in_set = vec![false; n];
    for &j in &working {
        in_set[j] = true;
    }
    let mut warm: Option<Vec<f64>> = None;
    let mut total_iters = 0;
    let mut trace = Vec::new();
    let mut outer = 0;
    loop {
        outer += 1;
        let sub = linalg::select_columns(x, &working);
        let sub_sol = if working.len() == r {
            solve_mvee(&sub, opts)?
        } else {
            let design = match warm.take() {
                Some(mut u) => {
                    u.resize(working.len(), 0.0);
                    Design::new(&sub, u)
                }
                None => initial_design(&sub),
            };
            solve_from(&sub, design, opts)?
        };
        total_iters += sub_sol.iterations;
        trace.extend(sub_sol.trace.iter().copied());

        // leverages of every column under the restricted design
        let minv = &sub_sol.a * sub_sol.gamma;
        let g_all = leverages(x, &minv);
        let mut violated: Vec<(usize, f64)> = g_all
            .iter()
            .enumerate()
            .filter(|&(j, &g)| !in_set[j] && g / sub_sol.gamma > 1.0 + FEASIBILITY_TOL)
            .map(|(j, &g)| (j, g))
            .collect();
        if violated.is_empty() {
            let mut u = vec![0.0; n];
            for (k, &j) in working.iter().enumerate() {
                u[j] = sub_sol.u[k];
            }
            let gamma = g_all.iter().copied().fold(sub_sol.gamma, f64::max);
            let active_set = (0..n).filter(|&j| u[j] > 0.0).collect();
            return Ok(EllipsoidSolution {
                a: symmetrize(&(&minv / gamma)),
                u,
                gamma,
                alpha_cert: certificate(r, gamma),
                logdet: sub_sol.logdet,
                iterations: total_iters,
                outer_iterations: outer,
                converged: sub_sol.converged,
                active_set,
                trace,
            });
        }
        violated.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        warm = Some(sub_sol.u.clone());
        for &(j, _) in violated.iter().take(r) {
            working.push(j);
            in_set[j] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_middle_points, make_random_separable};

    fn random_matrix(r: usize, n: usize, seed: u64) -> DMatrix<f64> {
        let mut s = seed;
        DMatrix::from_fn(r, n, |_, _| {
            s = crate::seed::splitmix64(s);
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
    }

    fn assert_feasible(x: &DMatrix<f64>, a: &DMatrix<f64>) {
        for c in x.column_iter() {
            let v = (c.transpose() * a * c)[(0, 0)];
            assert!(v <= 1.0 + FEASIBILITY_TOL, "constraint value {v}");
        }
    }

    #[test]
    fn identity_points() {
        let x = DMatrix::<f64>::identity(3, 3);
        let sol = solve_mvee(&x, &MveeOptions::default()).unwrap();
        assert!((sol.a.clone() - DMatrix::identity(3, 3)).norm() < 1e-12);
        assert_eq!(sol.alpha_cert, 1.0);
    }

    #[test]
    fn identity_with_duplicates() {
        let mut x = DMatrix::<f64>::zeros(3, 6);
        for j in 0..6 {
            x[(j % 3, j)] = 1.0;
        }
        let sol = solve_mvee(&x, &MveeOptions::with_alpha(0.999)).unwrap();
        assert!((sol.a.clone() - DMatrix::identity(3, 3)).norm() < 1e-6);
        let (gamma, alpha) = alpha_certificate(&[1.0 / 6.0; 6], &x).unwrap();
        assert!((gamma - 3.0).abs() < 1e-12);
        assert!((alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axis_aligned_scaling() {
        let x = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let sol = solve_mvee(&x, &MveeOptions::default()).unwrap();
        assert!((sol.a[(0, 0)] - 0.25).abs() < 1e-12);
        assert!((sol.a[(1, 1)] - 1.0).abs() < 1e-12);
        assert!(sol.a[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn certificate_matches_explicit_inverse() {
        let x = DMatrix::from_row_slice(2, 3, &[1.0, -0.5, 0.3, 0.2, 1.1, -0.9]);
        let u = [1.0 / 3.0; 3];
        let (gamma, alpha) = alpha_certificate(&u, &x).unwrap();
        // explicit 2x2 inverse
        let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
        for j in 0..3 {
            let (p, q) = (x[(0, j)], x[(1, j)]);
            a += p * p / 3.0;
            b += p * q / 3.0;
            d += q * q / 3.0;
        }
        let det = a * d - b * b;
        let mut g: f64 = 0.0;
        for j in 0..3 {
            let (p, q) = (x[(0, j)], x[(1, j)]);
            g = g.max((d * p * p - 2.0 * b * p * q + a * q * q) / det);
        }
        assert!((gamma - g).abs() < 1e-12 * g);
        assert!((alpha - (2.0 / g).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn certificate_errors() {
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert_eq!(alpha_certificate(&[1.0 / 3.0; 3], &x), Err(Error::SingularDesign));
        assert!(alpha_certificate(&[0.5, 0.5, 0.5], &x).is_err());
        assert!(alpha_certificate(&[1.5, -0.5, 0.0], &x).is_err());
    }

    #[test]
    fn rank_deficient_is_reported() {
        let x = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 3.0, 4.0, 2.0, 4.0, 6.0, 8.0]);
        match solve_mvee(&x, &MveeOptions::default()) {
            Err(Error::RankDeficient { needed: 2, found: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = DMatrix::<f64>::identity(2, 3);
        assert!(solve_mvee(&x, &MveeOptions::with_alpha(1.0)).is_err());
        assert!(solve_mvee(&x, &MveeOptions::with_alpha(0.0)).is_err());
        let mut y = x.clone();
        y[(0, 2)] = f64::INFINITY;
        assert_eq!(solve_mvee(&y, &MveeOptions::default()).unwrap_err(), Error::NonFinite);
        assert!(solve_mvee(&DMatrix::<f64>::identity(3, 2), &MveeOptions::default()).is_err());
    }

    #[test]
    fn random_solutions_are_feasible_and_certified() {
        for seed in 0..10 {
            let x = random_matrix(4, 40, seed);
            let sol = solve_mvee(&x, &MveeOptions::with_alpha(0.995)).unwrap();
            assert!(sol.converged);
            assert!(sol.alpha_cert >= 0.995);
            assert_feasible(&x, &sol.a);
            assert!(sol.gamma >= 4.0 - 1e-9);
            assert!((sol.alpha_cert - (4.0 / sol.gamma).powi(4)).abs() < 1e-12);
            assert!(linalg::symmetrize(&sol.a) == sol.a);
            assert!(sol.a.clone().cholesky().is_some());
            let (g, al) = alpha_certificate(&sol.u, &x).unwrap();
            assert!((g - sol.gamma).abs() < 1e-9 * g);
            assert!((al - sol.alpha_cert).abs() < 1e-9);
            let s: f64 = sol.u.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!((sol.log_det_a() - sol.det_a().ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn logdet_is_monotone() {
        let x = random_matrix(5, 80, 21);
        let opts = MveeOptions { alpha_target: 0.999, trace: true, ..MveeOptions::default() };
        let sol = solve_mvee(&x, &opts).unwrap();
        assert!(sol.trace.len() > 2);
        for w in sol.trace.windows(2) {
            assert!(w[1].logdet >= w[0].logdet - 1e-10, "{:?}", w);
        }
    }

    #[test]
    fn max_iters_returns_not_converged() {
        let x = random_matrix(6, 100, 5);
        let opts = MveeOptions { alpha_target: 0.9999, max_iters: 3, trace: false };
        let sol = solve_mvee(&x, &opts).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 3);
        assert_feasible(&x, &sol.a);
    }

    #[test]
    fn rotation_preserves_volume() {
        let x = random_matrix(3, 30, 8);
        let q = random_matrix(3, 3, 99).qr().q();
        let opts = MveeOptions::with_alpha(1.0 - 1e-10);
        let a = solve_mvee(&x, &opts).unwrap();
        let b = solve_mvee(&(&q * &x), &opts).unwrap();
        let (da, db) = (a.det_a(), b.det_a());
        assert!(((da - db) / da).abs() < 1e-8, "{da} vs {db}");
    }

    #[test]
    fn noiseless_separable_recovers_wwt_inverse() {
        for seed in 0..5 {
            let inst = make_random_separable(4, 4, 30, 0.0, seed).unwrap();
            let sol = solve_mvee(&inst.x_noisy, &MveeOptions::with_alpha(0.9999)).unwrap();
            let target = (&inst.w * inst.w.transpose()).try_inverse().unwrap();
            let rel = (&sol.a - &target).norm() / target.norm();
            assert!(rel <= 10.0 * (1.0 - sol.alpha_cert) + 1e-9, "rel {rel}, cert {}", sol.alpha_cert);
        }
    }

    #[test]
    fn active_set_identity_single_round() {
        let x = DMatrix::<f64>::identity(3, 3);
        let sol = active_set_solve(&x, &MveeOptions::default()).unwrap();
        assert_eq!(sol.outer_iterations, 1);
        assert!((sol.a.clone() - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn active_set_matches_full_solve() {
        for seed in 0..6 {
            let x = random_matrix(3, 60, 100 + seed);
            let opts = MveeOptions::with_alpha(0.99);
            let full = solve_mvee(&x, &opts).unwrap();
            let act = active_set_solve(&x, &opts).unwrap();
            assert_feasible(&x, &act.a);
            assert!(act.alpha_cert >= 0.99);
            let rel = (act.det_a() - full.det_a()).abs() / full.det_a();
            assert!(rel <= 2.0 * (1.0 - 0.99), "rel {rel}");
            let (g, _) = alpha_certificate(&act.u, &x).unwrap();
            assert!((g - act.gamma).abs() < 1e-9 * g);
        }
    }

    #[test]
    fn active_set_middle_points_cap() {
        let r = 6;
        let inst = make_middle_points(15, r, 0.3, 2).unwrap();
        let svd = crate::precond::truncated_svd(&inst.x_noisy, r).unwrap();
        let y = DMatrix::from_diagonal(&svd.s) * svd.v.transpose();
        let sol = active_set_solve(&y, &MveeOptions::default()).unwrap();
        assert!(sol.active_set.len() <= r * (r + 1) / 2 + 10);
        assert_feasible(&y, &sol.a);
    }
}
