use alloc::string::String;

use crate::error::{invalid, Result};
use crate::num;

/// Convention string for bounds that hold exactly as stated.
pub const EXACT: &str = "exact";
/// Convention string for asymptotic bounds evaluated with unit constants.
pub const UNIT_CONSTANTS: &str = "all O(.) constants taken as 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `measured <= bound + tolerance`
    Upper,
    /// `measured >= bound - tolerance`
    Lower,
    /// `|measured - bound| <= tolerance`
    Equality,
    /// Reported only; never asserted.
    Trend,
}

/// One bound evaluated on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub kind: BoundKind,
    pub premise_holds: bool,
    pub bound_value: f64,
    pub measured_value: Option<f64>,
    pub tolerance: f64,
    pub constant_convention: &'static str,
}

impl BoundReport {
    pub fn new(name: &str, kind: BoundKind, premise_holds: bool, bound_value: f64, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            kind,
            premise_holds,
            bound_value,
            measured_value: Some(measured),
            tolerance,
            constant_convention: if kind == BoundKind::Trend { UNIT_CONSTANTS } else { EXACT },
        }
    }

    pub fn assertion_grade(&self) -> bool {
        self.kind != BoundKind::Trend
    }

    /// `Some(pass)` for assertion-grade rows whose premise holds, else `None`.
    pub fn passed(&self) -> Option<bool> {
        if !self.assertion_grade() || !self.premise_holds {
            return None;
        }
        let m = self.measured_value?;
        let b = self.bound_value;
        let t = self.tolerance;
        Some(match self.kind {
            BoundKind::Upper => m <= b + t,
            BoundKind::Lower => m >= b - t,
            BoundKind::Equality => num::abs(m - b) <= t,
            BoundKind::Trend => unreachable!(),
        })
    }

    pub fn violated(&self) -> bool {
        self.passed() == Some(false)
    }
}

/// Noise premise `eps <= sigma_min(W) / (8 r sqrt(r))` under which every
/// feasible ellipsoid has `trace(W^T A W) <= r + 1` (square case).
pub fn small_noise_premise(epsilon: f64, sigma_min_w: f64, r: usize) -> bool {
    let r = r as f64;
    epsilon <= sigma_min_w / (8.0 * r * num::sqrt(r))
}

/// `kappa(C) <= 12 / alpha` for an alpha-approximate ellipsoid, `C = W^T A W`.
pub fn approx_ellipsoid_kappa_bound(alpha: f64) -> f64 {
    12.0 / alpha
}

/// `det(C) >= alpha (1 + eps / sigma_min(W))^(-2r)`.
pub fn approx_ellipsoid_det_bound(alpha: f64, epsilon: f64, sigma_min_w: f64, r: usize) -> f64 {
    alpha * num::powf(1.0 + epsilon / sigma_min_w, -2.0 * r as f64)
}

/// `(sqrt(1 + n - r) + delta') / (1 - delta')`: condition number of
/// `[I_r, H'] + N'` when `||N'||_2 <= delta' < 1`.
pub fn prewhiten_kappa_bound(n: usize, r: usize, delta_prime: f64) -> Result<f64> {
    if r == 0 || n < r {
        return Err(invalid("need n >= r >= 1"));
    }
    if !(0.0..1.0).contains(&delta_prime) {
        return Err(invalid("delta' must lie in [0, 1)"));
    }
    Ok((num::sqrt((1 + n - r) as f64) + delta_prime) / (1.0 - delta_prime))
}

/// Condition number bound for pre-whitening under the Dirichlet model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerativeBound {
    /// `kappa(W) sqrt((u s_min^2 + s_N^2) / (l s_max^2 + s_N^2))`.
    pub bound: f64,
    /// Noise-free limit `sqrt((alpha_max + ||alpha||^2) / alpha_min)`.
    pub small_noise: f64,
    /// `sqrt(1 + r beta)` when every concentration equals `beta`.
    pub symmetric_form: Option<f64>,
}

pub fn generative_kappa_bound(
    sigma_min_w: f64,
    sigma_max_w: f64,
    alpha: &[f64],
    sigma_noise: f64,
) -> Result<GenerativeBound> {
    if !(sigma_min_w > 0.0) || !(sigma_max_w >= sigma_min_w) || !sigma_max_w.is_finite() {
        return Err(invalid("need 0 < sigma_min <= sigma_max"));
    }
    if !(sigma_noise >= 0.0) {
        return Err(invalid("sigma_noise must be nonnegative"));
    }
    let moment = super::dirichlet_second_moment(alpha)?;
    let (u, l) = (moment.u_bound, moment.l_bound);
    let s2 = sigma_noise * sigma_noise;
    let kw = sigma_max_w / sigma_min_w;
    let bound = kw * num::sqrt((u * sigma_min_w * sigma_min_w + s2) / (l * sigma_max_w * sigma_max_w + s2));
    let small_noise = num::sqrt(u / l);
    let first = alpha[0];
    let symmetric_form = alpha
        .iter()
        .all(|&a| a == first)
        .then(|| num::sqrt(1.0 + alpha.len() as f64 * first));
    Ok(GenerativeBound { bound, small_noise, symmetric_form })
}

/// Preconditioned SPA error trend: premise
/// `eps <= sigma_min(W) / (sqrt(r) kappa(QW)^3)`, error `eps kappa(W) kappa(QW)^3`,
/// with unit constants.
pub fn spa_error_bound(kappa_w: f64, kappa_qw: f64, epsilon: f64, sigma_min_w: f64, r: usize) -> BoundReport {
    let k3 = kappa_qw * kappa_qw * kappa_qw;
    let premise = epsilon <= sigma_min_w / (num::sqrt(r as f64) * k3);
    BoundReport {
        name: "preconditioned_spa_error".into(),
        kind: BoundKind::Trend,
        premise_holds: premise,
        bound_value: epsilon * kappa_w * k3,
        measured_value: None,
        tolerance: 0.0,
        constant_convention: UNIT_CONSTANTS,
    }
}
