//! Drift-parameter block: the Gaussian posterior of φ = (D₁..D_c, γ) under
//! the Euler likelihood with a flat prior, and the deliberately inconsistent
//! joint drift estimator derived from the Itô-Taylor likelihood.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{solve2, CholeskyLower};
use crate::model::{force_basis_into, DriftParams, ModelSpec, Path};
use crate::rng::Prng;
use crate::Error;

/// Natural parameters of the drift posterior: φ | P, σ ~ N(M⁻¹b, M⁻¹).
///
/// With the feature vector a_n = (f₁(Q_n), …, f_c(Q_n), P_n) the Euler
/// update reads ΔP_n ≈ −Δt aₙᵀφ + √Δt σ ξ, so
///
/// ```text
///   M = (Δt/σ²) Σ_n a_n a_nᵀ,    b = −(1/σ²) Σ_n a_n ΔP_n.
/// ```
///
/// Note that σ cancels in the mean M⁻¹b; it only widens the covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftPosterior {
    dim: usize,
    /// Row-major dim×dim precision matrix M.
    pub m: Vec<f64>,
    /// Shift vector b.
    pub b: Vec<f64>,
}

impl DriftPosterior {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Posterior mean M⁻¹b.
    pub fn mean(&self) -> Result<Vec<f64>, Error> {
        let chol = CholeskyLower::factor(&self.m, self.dim)?;
        Ok(chol.solve(&self.b))
    }
}

/// Accumulates the drift posterior from a fully imputed path.
pub fn drift_posterior(
    path: &Path,
    spec: &ModelSpec,
    sigma: f64,
) -> Result<DriftPosterior, Error> {
    let dim = spec.param_count();
    if dim == 0 {
        return Err(Error::UnsupportedModel("model has no free drift parameters"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument("sigma must be positive and finite"));
    }
    let p = path.rough()?;
    let n = path.n_steps();
    if n < dim {
        return Err(Error::IllConditioned("fewer increments than drift parameters"));
    }
    let dt = path.dt;
    let inv_s2 = 1.0 / (sigma * sigma);
    let mut a = vec![0.0; dim];
    let mut m = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for i in 0..n {
        force_basis_into(spec, path.q[i], p[i], &mut a);
        let dp = p[i + 1] - p[i];
        for r in 0..dim {
            b[r] -= inv_s2 * a[r] * dp;
            for s in r..dim {
                m[r * dim + s] += a[r] * a[s];
            }
        }
    }
    let scale = dt * inv_s2;
    for r in 0..dim {
        for s in r..dim {
            let v = m[r * dim + s] * scale;
            m[r * dim + s] = v;
            m[s * dim + r] = v;
        }
    }
    Ok(DriftPosterior { dim, m, b })
}

/// Draws φ = M⁻¹b + L⁻ᵀξ with M = LLᵀ and the supplied noise vector;
/// ξ = 0 returns the posterior mean exactly.
pub fn sample_drift_with_noise(post: &DriftPosterior, xi: &[f64]) -> Result<DriftParams, Error> {
    if xi.len() != post.dim {
        return Err(Error::DimensionMismatch { expected: post.dim, got: xi.len() });
    }
    let chol = CholeskyLower::factor(&post.m, post.dim)?;
    let mut phi = chol.solve(&post.b);
    let fluct = chol.solve_upper(xi);
    for (p, f) in phi.iter_mut().zip(&fluct) {
        *p += f;
    }
    DriftParams::from_flat(&phi)
}

/// Draws one sample from the drift posterior.
pub fn sample_drift(post: &DriftPosterior, rng: &mut Prng) -> Result<DriftParams, Error> {
    let xi: Vec<f64> = (0..post.dim).map(|_| rng.sample(StandardNormal)).collect();
    sample_drift_with_noise(post, &xi)
}

/// Joint (D̂, γ̂) maximizer of the Itô-Taylor likelihood for the harmonic
/// model with both components observed. This estimator is known-bad: it
/// converges to one quarter of the true parameters as Δt → 0, and exists to
/// demonstrate exactly that. Stationarity conditions (from ∂Z/∂D = ∂Z/∂γ = 0):
///
/// ```text
///   [Σ Q²Δt   Σ QPΔt] (D̂)   (−Σ Q ΔP)   3 (Σ Q (ΔQ/Δt − P))
///   [Σ QPΔt   Σ P²Δt] (γ̂) = (−Σ P ΔP) + — (Σ P (ΔQ/Δt − P))
///                                        2
/// ```
pub fn drift_mle_ito(path: &Path) -> Result<(f64, f64), Error> {
    let p = path.rough()?;
    let n = path.n_steps();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two increments"));
    }
    let dt = path.dt;
    let (mut sqq, mut sqp, mut spp) = (0.0, 0.0, 0.0);
    let (mut rhs_q, mut rhs_p) = (0.0, 0.0);
    for i in 0..n {
        let q = path.q[i];
        let v = p[i];
        let dq = path.q[i + 1] - q;
        let dp = p[i + 1] - v;
        sqq += q * q;
        sqp += q * v;
        spp += v * v;
        let slack = dq / dt - v;
        rhs_q += -q * dp + 1.5 * q * slack;
        rhs_p += -v * dp + 1.5 * v * slack;
    }
    let m = [[sqq * dt, sqp * dt], [sqp * dt, spp * dt]];
    let sol = solve2(m, [rhs_q, rhs_p])?;
    Ok((sol[0], sol[1]))
}
