//! Missing-path block: the Itô-Taylor log-likelihood is an exact quadratic
//! in the hidden rough path P = (P_0, …, P_N), so its conditional given the
//! positions is Gaussian with a tridiagonal precision. One O(N) banded
//! Cholesky factorization gives both the conditional mode and exact draws.
//!
//! All endpoints are part of the sampled vector: P_0 and P_N each appear in
//! one increment residual, interior entries in two.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::TridiagCholesky;
use crate::model::{rough_drift, DriftParams, ModelSpec};
use crate::rng::Prng;
use crate::Error;

/// The affine gradient of the Itô-Taylor log-likelihood in P:
/// ∇_P log L = Pmat·P + Qvec with Pmat tridiagonal negative definite.
/// `diag`/`offdiag` store Pmat's bands, `qvec` the offset.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionSystem {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub qvec: Vec<f64>,
}

impl PrecisionSystem {
    /// Number of sampled P entries (observation count, N+1).
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Evaluates Pmat·p + Qvec, the exact gradient at p.
    pub fn grad(&self, p: &[f64]) -> Result<Vec<f64>, Error> {
        let n = self.dim();
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        let mut g = self.qvec.clone();
        for i in 0..n {
            g[i] += self.diag[i] * p[i];
            if i > 0 {
                g[i] += self.offdiag[i - 1] * p[i - 1];
            }
            if i + 1 < n {
                g[i] += self.offdiag[i] * p[i + 1];
            }
        }
        Ok(g)
    }

    /// The conditional mode −Pmat⁻¹·Qvec (gradient root).
    pub fn mode(&self) -> Result<Vec<f64>, Error> {
        Ok(self.factor()?.solve(&self.qvec))
    }

    /// Cholesky UᵀU = −Pmat of the (positive definite) negated matrix.
    fn factor(&self) -> Result<TridiagCholesky, Error> {
        let neg_diag: Vec<f64> = self.diag.iter().map(|d| -d).collect();
        let neg_off: Vec<f64> = self.offdiag.iter().map(|e| -e).collect();
        TridiagCholesky::factor(&neg_diag, &neg_off)
    }
}

/// Assembles the gradient system from positions alone.
///
/// Each increment contributes two linear residual forms in (P_n, P_{n+1}).
/// Writing f(q) for the position part of the rough drift (the −γp part is
/// kept symbolic, `theta.gamma` enters the coefficients):
///
/// ```text
///   s_n = ΔQ_n/Δt + (Δt/2) f(Q_n) − (1+Δtγ)/2 · P_n − P_{n+1}/2
///   r_n = −Δt f(Q_n) − (1−Δtγ) · P_n + P_{n+1}
///   log L = −(1/(2σ²Δt)) Σ_n (12 s_n² + r_n²) + const(σ)
/// ```
///
/// The drift must be affine in p, which holds for every supported model.
pub fn path_precision(
    q: &[f64],
    spec: &ModelSpec,
    theta: &DriftParams,
    sigma: f64,
    dt: f64,
) -> Result<PrecisionSystem, Error> {
    if q.len() < 2 {
        return Err(Error::InvalidArgument("need at least two positions"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument("sigma must be positive and finite"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument("dt must be positive and finite"));
    }
    if !theta.matches(spec) {
        return Err(Error::DimensionMismatch {
            expected: spec.force_terms(),
            got: theta.d.len(),
        });
    }
    let n_pts = q.len();
    let w = 1.0 / (sigma * sigma * dt);
    let g = theta.gamma;
    let alpha_s = -(1.0 + dt * g) / 2.0;
    let beta_s = -0.5;
    let alpha_r = -(1.0 - dt * g);
    let beta_r = 1.0;
    let daa = w * (12.0 * alpha_s * alpha_s + alpha_r * alpha_r);
    let dbb = w * (12.0 * beta_s * beta_s + beta_r * beta_r);
    let dab = w * (12.0 * alpha_s * beta_s + alpha_r * beta_r);

    let mut diag = vec![0.0; n_pts];
    let mut offdiag = vec![0.0; n_pts - 1];
    let mut qvec = vec![0.0; n_pts];
    for i in 0..n_pts - 1 {
        let f = rough_drift(spec, theta, q[i], 0.0)?;
        let cs = (q[i + 1] - q[i]) / dt + 0.5 * dt * f;
        let cr = -dt * f;
        diag[i] -= daa;
        diag[i + 1] -= dbb;
        offdiag[i] -= dab;
        qvec[i] -= w * (12.0 * cs * alpha_s + cr * alpha_r);
        qvec[i + 1] -= w * (12.0 * cs * beta_s + cr * beta_r);
    }
    Ok(PrecisionSystem { diag, offdiag, qvec })
}

/// Exact draw from P | Q, θ, σ with caller-supplied standard normals:
/// P = mode + U⁻¹ξ with UᵀU = −Pmat. ξ = 0 returns the mode itself.
pub fn sample_path_with_noise(
    q: &[f64],
    spec: &ModelSpec,
    theta: &DriftParams,
    sigma: f64,
    dt: f64,
    xi: &[f64],
) -> Result<Vec<f64>, Error> {
    let sys = path_precision(q, spec, theta, sigma, dt)?;
    if xi.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: xi.len() });
    }
    let chol = sys.factor()?;
    let mut p = chol.solve(&sys.qvec);
    let mut fluct = xi.to_vec();
    chol.solve_u(&mut fluct);
    for (pi, fi) in p.iter_mut().zip(&fluct) {
        *pi += fi;
    }
    Ok(p)
}

/// Exact draw from P | Q, θ, σ, O(N) time and memory.
pub fn sample_path_direct(
    q: &[f64],
    spec: &ModelSpec,
    theta: &DriftParams,
    sigma: f64,
    dt: f64,
    rng: &mut Prng,
) -> Result<Vec<f64>, Error> {
    let xi: Vec<f64> = (0..q.len()).map(|_| rng.sample(StandardNormal)).collect();
    sample_path_with_noise(q, spec, theta, sigma, dt, &xi)
}
