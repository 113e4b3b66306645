//! Ground-truth data generation: exact Gaussian transitions where the model
//! admits them, fine-grid Euler-Maruyama with subsampling otherwise.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::math;
use crate::model::{rough_drift, DriftParams, ModelKind, ModelSpec, Path, SQRT_12};
use crate::rng::{new_rng, Prng};
use crate::Error;

/// Aborting threshold for |q|+|p|: the supported force laws are globally
/// Lipschitz, so crossing this signals a misconfigured integration (time step
/// far too large), not model behaviour.
const EXPLOSION_BOUND: f64 = 1e8;

/// Everything needed to generate one observed trajectory.
///
/// `n_steps` is the number of observation increments (the path has
/// `n_steps + 1` points at spacing `dt`); `subsample` is the fine-grid
/// factor: Euler-Maruyama integrates at `dt / subsample` and records every
/// `subsample`-th state.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub spec: ModelSpec,
    pub theta: DriftParams,
    pub sigma: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub subsample: usize,
    pub x0: (f64, f64),
    pub seed: u64,
}

impl SimConfig {
    fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive and finite"));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be at least 1"));
        }
        if self.subsample == 0 {
            return Err(Error::InvalidArgument("subsample factor must be at least 1"));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidArgument("sigma must be nonnegative and finite"));
        }
        if !self.x0.0.is_finite() || !self.x0.1.is_finite() {
            return Err(Error::NonFinite("initial state"));
        }
        if !self.theta.matches(&self.spec) {
            return Err(Error::DimensionMismatch {
                expected: self.spec.force_terms(),
                got: self.theta.d.len(),
            });
        }
        Ok(())
    }
}

/// Samples the Growth model from its exact discrete transitions:
///
/// ```text
///   q_{n+1} = q_n + p_n Δt + σ Δt^{3/2} (ζ₁/√12 + ζ₂/2)
///   p_{n+1} = p_n + σ √Δt ζ₂
/// ```
///
/// with iid standard normals (ζ₁, ζ₂). `subsample` is accepted but ignored:
/// exact transitions compose exactly, so a finer grid changes nothing in law.
pub fn exact_growth_path(cfg: &SimConfig) -> Result<Path, Error> {
    cfg.validate()?;
    if cfg.spec.kind() != ModelKind::Growth {
        return Err(Error::UnsupportedModel("exact_growth_path needs the Growth model"));
    }
    let mut rng = new_rng(cfg.seed);
    let dt = cfg.dt;
    let amp_q = cfg.sigma * dt * math::sqrt(dt);
    let amp_p = cfg.sigma * math::sqrt(dt);
    let (mut q, mut p) = cfg.x0;
    let mut qs = Vec::with_capacity(cfg.n_steps + 1);
    let mut ps = Vec::with_capacity(cfg.n_steps + 1);
    qs.push(q);
    ps.push(p);
    for _ in 0..cfg.n_steps {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        q += p * dt + amp_q * (z1 / SQRT_12 + z2 / 2.0);
        p += amp_p * z2;
        qs.push(q);
        ps.push(p);
    }
    Path::new(dt, qs, Some(ps))
}

/// One exact transition of the harmonic model, precomputed per
/// (D, γ, σ, dt): x' = A x + L ξ with A = exp(M dt),
/// L Lᵀ = S = ∫₀^dt exp(Ms) C Cᵀ exp(Mᵀs) ds, M = [[0,1],[−D,−γ]],
/// C Cᵀ = diag(0, σ²).
///
/// Build one stepper and reuse it across a whole path; the matrix
/// exponential and the covariance integral are evaluated once.
#[derive(Clone, Debug)]
pub struct HarmonicStepper {
    a: [[f64; 2]; 2],
    /// Lower-triangular square root of S.
    l: [[f64; 2]; 2],
}

impl HarmonicStepper {
    pub fn new(theta: &DriftParams, sigma: f64, dt: f64) -> Result<Self, Error> {
        if theta.d.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: theta.d.len() });
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive and finite"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument("sigma must be nonnegative and finite"));
        }
        let d = theta.d[0];
        let g = theta.gamma;
        if !d.is_finite() || !g.is_finite() {
            return Err(Error::NonFinite("harmonic drift parameters"));
        }
        let m = [0.0, 1.0, -d, -g];
        let a_flat = mat_exp(&scale_mat(&m, dt), 2);
        let a = [[a_flat[0], a_flat[1]], [a_flat[2], a_flat[3]]];
        let s = increment_covariance(&m, sigma, dt);
        let l = chol2(s)?;
        Ok(HarmonicStepper { a, l })
    }

    /// Advances one observation step given two standard-normal draws.
    pub fn step(&self, x: (f64, f64), noise: (f64, f64)) -> (f64, f64) {
        let (q, p) = x;
        let (z1, z2) = noise;
        (
            self.a[0][0] * q + self.a[0][1] * p + self.l[0][0] * z1,
            self.a[1][0] * q + self.a[1][1] * p + self.l[1][0] * z1 + self.l[1][1] * z2,
        )
    }

    /// The transition matrix exp(M dt).
    pub fn transition(&self) -> [[f64; 2]; 2] {
        self.a
    }

    /// The increment covariance S (reassembled from its Cholesky factor).
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let l = self.l;
        [
            [l[0][0] * l[0][0], l[0][0] * l[1][0]],
            [l[0][0] * l[1][0], l[1][0] * l[1][0] + l[1][1] * l[1][1]],
        ]
    }
}

/// Samples the damped harmonic model from its exact Gaussian transitions,
/// one [`HarmonicStepper`] draw per observation step. As with
/// [`exact_growth_path`], `subsample` is accepted but ignored.
pub fn exact_harmonic_path(cfg: &SimConfig) -> Result<Path, Error> {
    cfg.validate()?;
    if cfg.spec.kind() != ModelKind::Harmonic {
        return Err(Error::UnsupportedModel("exact_harmonic_path needs the harmonic model"));
    }
    let stepper = HarmonicStepper::new(&cfg.theta, cfg.sigma, cfg.dt)?;
    let mut rng = new_rng(cfg.seed);
    let (mut q, mut p) = cfg.x0;
    let mut qs = Vec::with_capacity(cfg.n_steps + 1);
    let mut ps = Vec::with_capacity(cfg.n_steps + 1);
    qs.push(q);
    ps.push(p);
    for _ in 0..cfg.n_steps {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let next = stepper.step((q, p), (z1, z2));
        q = next.0;
        p = next.1;
        qs.push(q);
        ps.push(p);
    }
    Path::new(cfg.dt, qs, Some(ps))
}

/// One exact harmonic transition; convenience wrapper that builds the
/// stepper on the fly. Loops should construct [`HarmonicStepper`] once
/// instead.
pub fn exact_harmonic_step(
    theta: &DriftParams,
    sigma: f64,
    dt: f64,
    x: (f64, f64),
    noise: (f64, f64),
) -> Result<(f64, f64), Error> {
    if !x.0.is_finite() || !x.1.is_finite() || !noise.0.is_finite() || !noise.1.is_finite() {
        return Err(Error::NonFinite("state or noise"));
    }
    Ok(HarmonicStepper::new(theta, sigma, dt)?.step(x, noise))
}

/// Simulates `n_steps · subsample` fine Euler-Maruyama steps at spacing
/// `dt / subsample` and records every `subsample`-th state (plus the initial
/// one), giving an observed path at spacing `dt` whose discretization error
/// is controlled by the fine grid.
pub fn euler_fine_path(cfg: &SimConfig) -> Result<Path, Error> {
    cfg.validate()?;
    let mut rng = new_rng(cfg.seed);
    euler_fine_path_with(cfg, &mut rng)
}

/// As [`euler_fine_path`] but drawing from a caller-owned stream (the
/// config's own seed is ignored).
pub fn euler_fine_path_with(cfg: &SimConfig, rng: &mut Prng) -> Result<Path, Error> {
    cfg.validate()?;
    let k = cfg.subsample;
    let h = cfg.dt / k as f64;
    let amp = cfg.sigma * math::sqrt(h);
    let (mut q, mut p) = cfg.x0;
    let mut qs = Vec::with_capacity(cfg.n_steps + 1);
    let mut ps = Vec::with_capacity(cfg.n_steps + 1);
    qs.push(q);
    ps.push(p);
    for _ in 0..cfg.n_steps {
        for _ in 0..k {
            let z: f64 = rng.sample(StandardNormal);
            let drift = rough_drift(&cfg.spec, &cfg.theta, q, p)?;
            q += h * p;
            p += h * drift + amp * z;
        }
        if math::abs(q) + math::abs(p) > EXPLOSION_BOUND {
            return Err(Error::Diverged("Euler path explosion"));
        }
        qs.push(q);
        ps.push(p);
    }
    Path::new(cfg.dt, qs, Some(ps))
}

fn scale_mat(m: &[f64; 4], t: f64) -> [f64; 4] {
    [m[0] * t, m[1] * t, m[2] * t, m[3] * t]
}

/// Increment covariance S = ∫₀^dt exp(Ms) C Cᵀ exp(Mᵀs) ds via the
/// block-matrix exponential identity: with B = [[−M, CCᵀ], [0, Mᵀ]],
/// exp(B dt) = [[·, G], [0, F]] and S = Fᵀ G. Exact to machine precision,
/// no quadrature grid to tune.
fn increment_covariance(m: &[f64; 4], sigma: f64, dt: f64) -> [[f64; 2]; 2] {
    let s2 = sigma * sigma;
    // Row-major 4×4 B·dt.
    let mut b = [0.0f64; 16];
    // top-left −M
    b[0] = -m[0];
    b[1] = -m[1];
    b[4] = -m[2];
    b[5] = -m[3];
    // top-right CCᵀ = diag(0, σ²)
    b[7] = s2;
    // bottom-right Mᵀ
    b[10] = m[0];
    b[11] = m[2];
    b[14] = m[1];
    b[15] = m[3];
    let e = mat_exp(&scale_mat4(&b, dt), 4);
    let g = [[e[2], e[3]], [e[6], e[7]]];
    let f = [[e[10], e[11]], [e[14], e[15]]];
    // S = Fᵀ G.
    let mut s = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = f[0][i] * g[0][j] + f[1][i] * g[1][j];
        }
    }
    // Symmetrize away roundoff.
    let off = 0.5 * (s[0][1] + s[1][0]);
    s[0][1] = off;
    s[1][0] = off;
    s
}

fn scale_mat4(m: &[f64; 16], t: f64) -> Vec<f64> {
    m.iter().map(|x| x * t).collect()
}

/// Dense matrix exponential by scaling-and-squaring with a Taylor series,
/// for the tiny (n ≤ 4) matrices used here.
fn mat_exp(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    // Scale until the max-abs-row-sum norm is ≤ 1/2.
    let norm = (0..n)
        .map(|i| (0..n).map(|j| math::abs(a[i * n + j])).sum::<f64>())
        .fold(0.0f64, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a_scaled: Vec<f64> = a.iter().map(|x| x * scale).collect();

    // exp(A) = Σ A^k / k!; at norm ≤ 1/2, 20 terms are far below f64 eps.
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=20 {
        term = mat_mul(&term, &a_scaled, n);
        let inv_k = 1.0 / k as f64;
        for t in term.iter_mut() {
            *t *= inv_k;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result, n);
    }
    result
}

fn identity(n: usize) -> Vec<f64> {
    let mut id = vec![0.0; n * n];
    for i in 0..n {
        id[i * n + i] = 1.0;
    }
    id
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Lower-triangular Cholesky of a symmetric PSD 2×2 matrix (tolerant of a
/// zero matrix, which is the σ = 0 case).
fn chol2(s: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2], Error> {
    if s[0][0] < -1e-12 || s[1][1] < -1e-12 {
        return Err(Error::IllConditioned("negative variance in 2x2 covariance"));
    }
    let s11 = s[0][0].max(0.0);
    if s11 == 0.0 {
        if math::abs(s[0][1]) > 1e-12 {
            return Err(Error::IllConditioned("inconsistent 2x2 covariance"));
        }
        return Ok([[0.0, 0.0], [0.0, math::sqrt(s[1][1].max(0.0))]]);
    }
    let l11 = math::sqrt(s11);
    let l21 = s[0][1] / l11;
    let rem = (s[1][1] - l21 * l21).max(0.0);
    Ok([[l11, 0.0], [l21, math::sqrt(rem)]])
}
