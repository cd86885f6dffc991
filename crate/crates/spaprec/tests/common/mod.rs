//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Cyclic Jacobi eigenvalues of a symmetric matrix, sorted descending.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut a = a.clone();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Condition number from the Jacobi eigenvalues of `M^T M`.
pub fn kappa_by_eigen(m: &DMatrix<f64>) -> f64 {
    let ev = jacobi_eigenvalues(&(m.transpose() * m));
    (ev[0] / ev[ev.len() - 1]).sqrt()
}

/// Maximizes `f` over a box by repeated grid search, shrinking the box
/// around the incumbent after every pass. `f` returns `None` off the
/// feasible set.
pub fn zoom_maximize(
    f: impl Fn(f64, f64) -> Option<f64>,
    bounds: [(f64, f64); 2],
    grid: usize,
    passes: usize,
) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    let [(mut lo_a, mut hi_a), (mut lo_b, mut hi_b)] = bounds;
    for _ in 0..passes {
        for i in 0..=grid {
            let a = lo_a + (hi_a - lo_a) * i as f64 / grid as f64;
            for j in 0..=grid {
                let b = lo_b + (hi_b - lo_b) * j as f64 / grid as f64;
                if let Some(v) = f(a, b) {
                    if best.is_none_or(|(bv, _, _)| v > bv) {
                        best = Some((v, a, b));
                    }
                }
            }
        }
        let (_, a, b) = best?;
        let (da, db) = (20.0 * (hi_a - lo_a) / grid as f64, 20.0 * (hi_b - lo_b) / grid as f64);
        lo_a = (a - da).max(bounds[0].0);
        hi_a = (a + da).min(bounds[0].1);
        lo_b = (b - db).max(bounds[1].0);
        hi_b = (b + db).min(bounds[1].1);
    }
    best
}

/// Brute-force maximum of `lambda_1 / lambda_r` subject to
/// `sum lambda <= beta`, `prod lambda >= gamma`, `lambda` sorted and nonnegative.
///
/// For `r = 2` the grid runs over `(lambda_1, lambda_2)`; for larger `r`
/// over the three-value problem `x1 >= x2 >= x3` with multiplicities
/// `(1, r - 2, 1)` and `x1 + (r - 2) x2 + x3 = beta`, gridding `(x2, x3)`.
pub fn kappa_star_brute(r: usize, beta: f64, gamma: f64) -> f64 {
    // the smallest value is gridded on a log scale, the optimum sits where it is tiny
    let tol = 1.0 - 1e-12;
    let found = if r == 2 {
        zoom_maximize(
            |l1, log_l2| {
                let l2 = log_l2.exp();
                (l1 >= l2 && l1 + l2 <= beta && l1 * l2 >= gamma * tol).then(|| l1 / l2)
            },
            [(0.0, beta), (-40.0, beta.ln())],
            200,
            120,
        )
    } else {
        let k = (r - 2) as f64;
        zoom_maximize(
            |x2, log_x3| {
                let x3 = log_x3.exp();
                let x1 = beta - k * x2 - x3;
                (x2 >= x3 && x1 >= x2 && x1 * x2.powf(k) * x3 >= gamma * tol).then(|| x1 / x3)
            },
            [(0.0, beta / k), (-40.0, (beta / r as f64).ln())],
            200,
            120,
        )
    };
    // all-ones is feasible because beta >= r and gamma <= 1
    found.map_or(1.0, |(v, _, _)| v.max(1.0))
}

/// Largest determinant of a 2x2 SPD `A` with `x_j^T A x_j <= 1` for all
/// columns, searched over `A = R(theta) diag(1, t) R(theta)^T / s` with `s`
/// the smallest feasible scale.
pub fn mvee_2d_brute(x: &DMatrix<f64>) -> f64 {
    let det_for = |theta: f64, log_t: f64| -> Option<f64> {
        let t = log_t.exp();
        let (c, s) = (theta.cos(), theta.sin());
        let a11 = c * c + t * s * s;
        let a22 = s * s + t * c * c;
        let a12 = c * s * (1.0 - t);
        let worst = x
            .column_iter()
            .map(|v| a11 * v[0] * v[0] + 2.0 * a12 * v[0] * v[1] + a22 * v[1] * v[1])
            .fold(0.0f64, f64::max);
        (worst > 0.0).then(|| t / (worst * worst))
    };
    zoom_maximize(det_for, [(0.0, std::f64::consts::PI), (-12.0, 12.0)], 200, 60).map_or(0.0, |(v, _, _)| v)
}

/// Deterministic uniform `[lo, hi)` stream for test parameters.
pub struct Stream(pub u64);

impl Stream {
    pub fn next_f64(&mut self, lo: f64, hi: f64) -> f64 {
        self.0 = spaprec_core::seed::splitmix64(self.0);
        lo + (hi - lo) * ((self.0 >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn next_usize(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_f64(0.0, 1.0) * (hi - lo) as f64) as usize
    }
}
