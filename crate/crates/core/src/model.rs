//! Near-separable instance generators.
//!
//! An instance is `X_noisy = W H + N` where `H = [I_r, H']` (pure columns
//! first, no further permutation), every column of `H` is nonnegative with
//! 1-norm at most one, and `N` is the additive noise.
//!
//! Random draws use ChaCha20 seeded through `seed_from_u64`, in the fixed
//! order W (column-major), H', N. Gaussian variates come from the ziggurat
//! sampler of `rand_distr`; Dirichlet columns are normalized Gamma draws.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, max_column_norm};
use crate::num;

/// Identifier of the pseudo-random generator behind every instance.
pub const RNG_ID: &str = "chacha20/seed_from_u64";
/// Identifier of the Gaussian sampler.
pub const GAUSSIAN_ID: &str = "rand_distr::StandardNormal(ziggurat)";
/// Identifier of the Dirichlet construction.
pub const DIRICHLET_ID: &str = "normalized rand_distr::Gamma(marsaglia-tsang)";

const EPS_REL: f64 = 1e-12;

/// Which columns the middle-points noise is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseScope {
    /// Only the mixed (middle-point) columns move; pure columns stay exact.
    #[default]
    MixedOnly,
    /// Every column, pure ones included.
    AllColumns,
}

/// Provenance of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorInfo {
    pub family: &'static str,
    /// `delta` for the deterministic-noise families, `sigma_N` for Dirichlet.
    pub noise_level: f64,
    pub noise_scope: NoiseScope,
    /// False when the instance makes no pure-pixel guarantee.
    pub has_pure_pixels: bool,
}

/// A generated near-separable problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NearSeparableInstance {
    pub w: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub noise: DMatrix<f64>,
    pub x_noisy: DMatrix<f64>,
    /// `pure_indices[k]` is the column equal to `W(:,k)` before noise (0-based).
    pub pure_indices: Vec<usize>,
    /// Largest column norm of the noise.
    pub epsilon: f64,
    pub seed: u64,
    pub info: GeneratorInfo,
}

impl NearSeparableInstance {
    /// Assembles an instance from its factors and checks every invariant.
    pub fn from_parts(
        w: DMatrix<f64>,
        h: DMatrix<f64>,
        noise: DMatrix<f64>,
        pure_indices: Vec<usize>,
        seed: u64,
        info: GeneratorInfo,
    ) -> Result<Self> {
        let (m, r) = w.shape();
        let n = h.ncols();
        if h.nrows() != r || noise.shape() != (m, n) {
            return Err(invalid("W, H and N have incompatible shapes"));
        }
        linalg::ensure_finite(&w)?;
        linalg::ensure_finite(&h)?;
        linalg::ensure_finite(&noise)?;
        let x_noisy = &w * &h + &noise;
        let epsilon = max_column_norm(&noise);
        let inst = Self { w, h, noise, x_noisy, pure_indices, epsilon, seed, info };
        inst.check_invariants()?;
        Ok(inst)
    }

    pub fn m(&self) -> usize {
        self.w.nrows()
    }

    pub fn r(&self) -> usize {
        self.w.ncols()
    }

    pub fn n(&self) -> usize {
        self.h.ncols()
    }

    /// The noiseless data `W H`.
    pub fn x_clean(&self) -> DMatrix<f64> {
        &self.w * &self.h
    }

    pub fn check_invariants(&self) -> Result<()> {
        let r = self.r();
        for (j, col) in self.h.column_iter().enumerate() {
            if col.iter().any(|&v| v < 0.0) {
                return Err(invalid(alloc::format!("H(:,{j}) has a negative entry")));
            }
            if col.sum() > 1.0 + EPS_REL {
                return Err(invalid(alloc::format!("H(:,{j}) has 1-norm above one")));
            }
        }
        if self.info.has_pure_pixels {
            if self.pure_indices.len() != r {
                return Err(invalid("need exactly one pure index per endmember"));
            }
            for (k, &j) in self.pure_indices.iter().enumerate() {
                if j >= self.n() {
                    return Err(invalid("pure index out of range"));
                }
                let ok = self.h.column(j).iter().enumerate().all(|(i, &v)| {
                    if i == k {
                        v == 1.0
                    } else {
                        v == 0.0
                    }
                });
                if !ok {
                    return Err(invalid(alloc::format!("H(:,{j}) is not identity column {k}")));
                }
            }
        }
        let eps = max_column_norm(&self.noise);
        if num::abs(eps - self.epsilon) > EPS_REL * eps.max(1.0) {
            return Err(invalid("epsilon does not match the noise"));
        }
        Ok(())
    }
}

/// Parameters of the Dirichlet generative model.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    pub alpha: Vec<f64>,
    pub sigma_noise: f64,
    /// Whether `alpha` is nonincreasing, as the eigenvalue bounds assume.
    pub sorted: bool,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>, sigma_noise: f64) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(invalid("Dirichlet concentrations must be positive and finite"));
        }
        if !(sigma_noise >= 0.0) || !sigma_noise.is_finite() {
            return Err(invalid("sigma_noise must be nonnegative"));
        }
        let sorted = alpha.windows(2).all(|p| p[0] >= p[1]);
        Ok(Self { alpha, sigma_noise, sorted })
    }

    /// `(beta, ..., beta)` with `r` entries.
    pub fn symmetric(r: usize, beta: f64, sigma_noise: f64) -> Result<Self> {
        Self::new(vec![beta; r], sigma_noise)
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn uniform_matrix(rng: &mut ChaCha20Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random::<f64>())
}

/// Endmember matrix with i.i.d. uniform `[0, 1]` entries.
pub fn random_endmembers(m: usize, r: usize, seed: u64) -> DMatrix<f64> {
    uniform_matrix(&mut rng(seed), m, r)
}

fn gaussian_matrix(rng: &mut ChaCha20Rng, m: usize, n: usize, sigma: f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        sigma * z
    })
}

fn with_identity(r: usize, h_prime: &DMatrix<f64>) -> DMatrix<f64> {
    let n = r + h_prime.ncols();
    DMatrix::from_fn(r, n, |i, j| {
        if j < r {
            if i == j {
                1.0
            } else {
                0.0
            }
        } else {
            h_prime[(i, j - r)]
        }
    })
}

/// The 2x3 instance with `W = [[k+1, k], [k, k+1]]`,
/// `H = [[1, 0, .5], [0, 1, .5]]` and
/// `N = delta [-W(:,1), -W(:,2), W H(:,3)]`.
pub fn make_two_by_three(k: f64, delta: f64) -> Result<NearSeparableInstance> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(invalid("k must be nonnegative"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid("delta must lie in [0, 1)"));
    }
    let w = DMatrix::from_row_slice(2, 2, &[k + 1.0, k, k, k + 1.0]);
    let h = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
    let x = &w * &h;
    let mut noise = DMatrix::zeros(2, 3);
    noise.set_column(0, &(-delta * w.column(0)));
    noise.set_column(1, &(-delta * w.column(1)));
    noise.set_column(2, &(delta * x.column(2)));
    let info = GeneratorInfo {
        family: "two_by_three",
        noise_level: delta,
        noise_scope: NoiseScope::AllColumns,
        has_pure_pixels: true,
    };
    NearSeparableInstance::from_parts(w, h, noise, vec![0, 1], 0, info)
}

/// Middle-points family: `W` uniform on `[0,1]^{m x r}`, one mixed column
/// `(e_i + e_k)/2` per pair `i < k`, and noise `N(:,j) = delta (X(:,j) - w_bar)`
/// pushing the mixed columns away from the mean endmember.
pub fn make_middle_points(m: usize, r: usize, delta: f64, seed: u64) -> Result<NearSeparableInstance> {
    make_middle_points_with(m, r, delta, seed, NoiseScope::MixedOnly)
}

pub fn make_middle_points_with(
    m: usize,
    r: usize,
    delta: f64,
    seed: u64,
    scope: NoiseScope,
) -> Result<NearSeparableInstance> {
    if r < 2 {
        return Err(invalid("middle points need r >= 2"));
    }
    if m < r {
        return Err(invalid("middle points need m >= r"));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(invalid("delta must be nonnegative"));
    }
    let mut rng = rng(seed);
    let w = uniform_matrix(&mut rng, m, r);
    let pairs = r * (r - 1) / 2;
    let mut h_prime = DMatrix::zeros(r, pairs);
    let mut col = 0;
    for i in 0..r {
        for k in (i + 1)..r {
            h_prime[(i, col)] = 0.5;
            h_prime[(k, col)] = 0.5;
            col += 1;
        }
    }
    let h = with_identity(r, &h_prime);
    let x = &w * &h;
    let w_bar: DVector<f64> = w.column_mean();
    let n = h.ncols();
    let mut noise = DMatrix::zeros(m, n);
    let first = match scope {
        NoiseScope::MixedOnly => r,
        NoiseScope::AllColumns => 0,
    };
    for j in first..n {
        noise.set_column(j, &(delta * (x.column(j) - &w_bar)));
    }
    let info = GeneratorInfo {
        family: "middle_points",
        noise_level: delta,
        noise_scope: scope,
        has_pure_pixels: true,
    };
    NearSeparableInstance::from_parts(w, h, noise, (0..r).collect(), seed, info)
}

/// `X = W H + N` for given factors with `N(:,j) ~ N(0, sigma^2 I)` on every column.
pub fn with_gaussian_noise(
    w: &DMatrix<f64>,
    h: &DMatrix<f64>,
    pure_indices: Vec<usize>,
    sigma: f64,
    seed: u64,
) -> Result<NearSeparableInstance> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma must be nonnegative"));
    }
    let noise = gaussian_matrix(&mut rng(seed), w.nrows(), h.ncols(), sigma);
    let info = GeneratorInfo {
        family: "csv_input",
        noise_level: sigma,
        noise_scope: NoiseScope::AllColumns,
        has_pure_pixels: !pure_indices.is_empty(),
    };
    NearSeparableInstance::from_parts(w.clone(), h.clone(), noise, pure_indices, seed, info)
}

/// Dirichlet generative model: `H(:,j) ~ Dir(alpha)` i.i.d., `N(:,j) ~ N(0, sigma^2 I)`.
///
/// No column is guaranteed to be pure, so `pure_indices` is empty.
pub fn make_dirichlet_instance(
    w: &DMatrix<f64>,
    params: &DirichletParams,
    n: usize,
    seed: u64,
) -> Result<NearSeparableInstance> {
    dirichlet_impl(w, params, n, seed, false)
}

/// Like [`make_dirichlet_instance`] but with `H = [I_r, H']`, where the `n`
/// columns of `H'` are Dirichlet draws, so recovery can be scored exactly.
/// The pure columns receive noise like every other column.
pub fn make_dirichlet_with_pure(
    w: &DMatrix<f64>,
    params: &DirichletParams,
    n: usize,
    seed: u64,
) -> Result<NearSeparableInstance> {
    dirichlet_impl(w, params, n, seed, true)
}

fn dirichlet_impl(
    w: &DMatrix<f64>,
    params: &DirichletParams,
    n: usize,
    seed: u64,
    with_pure: bool,
) -> Result<NearSeparableInstance> {
    let (m, r) = w.shape();
    if params.alpha.len() != r {
        return Err(invalid("alpha must have one entry per endmember"));
    }
    if n < r {
        return Err(invalid("need n >= r"));
    }
    if linalg::numerical_rank(w, 1e-10)? < r {
        return Err(Error::RankDeficient { needed: r, found: linalg::numerical_rank(w, 1e-10)? });
    }
    let mut rng = rng(seed);
    let h_mixed = sample_dirichlet_columns(&mut rng, &params.alpha, n)?;
    let (h, pure) = if with_pure {
        (with_identity(r, &h_mixed), (0..r).collect())
    } else {
        (h_mixed, Vec::new())
    };
    let noise = gaussian_matrix(&mut rng, m, h.ncols(), params.sigma_noise);
    let info = GeneratorInfo {
        family: "dirichlet",
        noise_level: params.sigma_noise,
        noise_scope: NoiseScope::AllColumns,
        has_pure_pixels: with_pure,
    };
    NearSeparableInstance::from_parts(w.clone(), h, noise, pure, seed, info)
}

/// `n` i.i.d. Dirichlet(alpha) columns built from normalized Gamma(alpha_i, 1) draws.
pub fn sample_dirichlet_columns<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: &[f64],
    n: usize,
) -> Result<DMatrix<f64>> {
    let r = alpha.len();
    let gammas: Vec<Gamma<f64>> = alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).map_err(|_| invalid("invalid Dirichlet concentration")))
        .collect::<Result<_>>()?;
    let mut h = DMatrix::zeros(r, n);
    let mut draw = vec![0.0; r];
    for j in 0..n {
        loop {
            for (d, g) in draw.iter_mut().zip(&gammas) {
                *d = g.sample(rng);
            }
            let s: f64 = draw.iter().sum();
            if s > 0.0 && s.is_finite() {
                for i in 0..r {
                    h[(i, j)] = draw[i] / s;
                }
                break;
            }
        }
    }
    Ok(h)
}

/// Separable instance whose mixed columns all equal endmember `k`:
/// `H' = [e_k, ..., e_k]` with `n - r` columns, noiseless.
pub fn make_single_endmember(w: &DMatrix<f64>, n: usize, k: usize) -> Result<NearSeparableInstance> {
    let r = w.ncols();
    if k >= r || n < r {
        return Err(invalid("need k < r <= n"));
    }
    let mut h_prime = DMatrix::zeros(r, n - r);
    for j in 0..(n - r) {
        h_prime[(k, j)] = 1.0;
    }
    let h = with_identity(r, &h_prime);
    let info = GeneratorInfo {
        family: "single_endmember",
        noise_level: 0.0,
        noise_scope: NoiseScope::AllColumns,
        has_pure_pixels: true,
    };
    let noise = DMatrix::zeros(w.nrows(), n);
    NearSeparableInstance::from_parts(w.clone(), h, noise, (0..r).collect(), 0, info)
}

/// Random separable instance used by the property suites.
///
/// `W` is uniform on `[0,1]^{m x r}`, the `n - r` mixed columns are
/// Dirichlet(1,...,1) draws scaled by a uniform factor in `[0.5, 1]` (so
/// their 1-norms stay below one), and each noise column points in a uniform
/// random direction with norm `epsilon * t_j`, `t_j` uniform on `(0, 1]`.
pub fn make_random_separable(
    m: usize,
    r: usize,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<NearSeparableInstance> {
    if r == 0 || m < r || n < r {
        return Err(invalid("need 1 <= r <= min(m, n)"));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(invalid("epsilon must be nonnegative"));
    }
    let mut rng = rng(seed);
    let w = uniform_matrix(&mut rng, m, r);
    let ones = vec![1.0; r];
    let mut h_prime = sample_dirichlet_columns(&mut rng, &ones, n - r)?;
    for mut col in h_prime.column_iter_mut() {
        let s = 0.5 + 0.5 * rng.random::<f64>();
        col *= s;
    }
    let h = with_identity(r, &h_prime);
    let mut noise = gaussian_matrix(&mut rng, m, n, 1.0);
    for mut col in noise.column_iter_mut() {
        let norm = col.norm();
        let t = 1.0 - rng.random::<f64>();
        if norm > 0.0 {
            col *= epsilon * t / norm;
        }
    }
    let info = GeneratorInfo {
        family: "random_separable",
        noise_level: epsilon,
        noise_scope: NoiseScope::AllColumns,
        has_pure_pixels: true,
    };
    NearSeparableInstance::from_parts(w, h, noise, (0..r).collect(), seed, info)
}
