//! Discrete-time pseudo-likelihoods for the partially observed system, and
//! the finite-difference imputation of the hidden rough component.
//!
//! Two approximations of the transition density are kept deliberately
//! distinct and are never interchangeable:
//!
//! * the Euler scheme treats the position update as deterministic and puts
//!   all noise on the velocity; it is consistent for the drift but not for
//!   every σ functional;
//! * the Itô-Taylor scheme keeps the order-Δt^{3/2} noise term in the
//!   position, giving a nondegenerate 2×2 increment covariance. For the
//!   Growth model it reproduces the exact transition density.

use alloc::vec::Vec;

use crate::math;
use crate::model::{rough_drift, DriftParams, ModelSpec, Path};
use crate::{Error, LogDensityValue};

/// Finite-difference imputation of the rough component from positions:
/// `P_n = (Q_{n+1} − Q_n) / dt`, with the final value replicated so the
/// output has the same length as the input.
pub fn nd_impute(q: &[f64], dt: f64) -> Result<Vec<f64>, Error> {
    if q.len() < 2 {
        return Err(Error::InvalidArgument("nd_impute needs at least two positions"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument("dt must be positive and finite"));
    }
    let mut p = Vec::with_capacity(q.len());
    for w in q.windows(2) {
        let v = (w[1] - w[0]) / dt;
        if !v.is_finite() {
            return Err(Error::NonFinite("imputed velocity"));
        }
        p.push(v);
    }
    p.push(*p.last().unwrap());
    Ok(p)
}

fn check_lik_args(
    path: &Path,
    spec: &ModelSpec,
    theta: &DriftParams,
    sigma: f64,
) -> Result<(), Error> {
    if path.n_steps() < 1 {
        return Err(Error::InvalidArgument("likelihood needs at least one increment"));
    }
    if !theta.matches(spec) {
        return Err(Error::DimensionMismatch {
            expected: spec.force_terms(),
            got: theta.d.len(),
        });
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument("sigma must be positive and finite"));
    }
    Ok(())
}

/// Euler log-likelihood (up to θ- and σ-independent constants):
///
/// ```text
///   −N log σ − Σ_n (ΔP_n − Δt a(Q_n, P_n))² / (2 σ² Δt)
/// ```
///
/// where a is the rough drift −γp + f(q). Only the velocity increments
/// carry noise here, which is what makes the drift step conjugate.
pub fn log_lik_euler(
    path: &Path,
    spec: &ModelSpec,
    theta: &DriftParams,
    sigma: f64,
) -> Result<LogDensityValue, Error> {
    check_lik_args(path, spec, theta, sigma)?;
    let p = path.rough()?;
    let dt = path.dt;
    let n = path.n_steps();
    let mut quad = 0.0;
    for i in 0..n {
        let a = rough_drift(spec, theta, path.q[i], p[i])?;
        let r = p[i + 1] - p[i] - dt * a;
        quad += r * r;
    }
    Ok(-(n as f64) * math::ln(sigma) - quad / (2.0 * sigma * sigma * dt))
}

/// The σ-free quadratic form of the Itô-Taylor scheme,
///
/// ```text
///   Z = (1/Δt) Σ_n ‖ R̃⁻¹ (Δx_n − Δt b(x_n)) ‖²,
/// ```
///
/// with b(x) = (p, −γp + f(q)) and R̃ the unit-σ noise matrix, so
/// ‖R̃⁻¹r‖² = 12 (r_q/Δt − r_p/2)² + r_p². Z is what both σ samplers
/// condition on; it does not depend on σ.
pub fn ito_taylor_quadform(
    path: &Path,
    spec: &ModelSpec,
    theta: &DriftParams,
) -> Result<f64, Error> {
    check_lik_args(path, spec, theta, 1.0)?;
    let p = path.rough()?;
    let dt = path.dt;
    let n = path.n_steps();
    let mut z = 0.0;
    for i in 0..n {
        let a = rough_drift(spec, theta, path.q[i], p[i])?;
        let rq = path.q[i + 1] - path.q[i] - dt * p[i];
        let rp = p[i + 1] - p[i] - dt * a;
        let u = rq / dt - rp / 2.0;
        z += 12.0 * u * u + rp * rp;
    }
    Ok(z / dt)
}

/// Itô-Taylor log-likelihood (up to θ- and σ-independent constants):
/// `−2N log σ − Z/(2σ²)` with Z from [`ito_taylor_quadform`]. The 2N
/// comes from the per-step covariance determinant σ⁴ Δt⁴/12.
///
/// For the Growth model the Itô-Taylor covariance equals the exact
/// transition covariance, so this is the exact log-likelihood there.
pub fn log_lik_ito_taylor(
    path: &Path,
    spec: &ModelSpec,
    theta: &DriftParams,
    sigma: f64,
) -> Result<LogDensityValue, Error> {
    check_lik_args(path, spec, theta, sigma)?;
    let z = ito_taylor_quadform(path, spec, theta)?;
    let n = path.n_steps() as f64;
    Ok(-2.0 * n * math::ln(sigma) - z / (2.0 * sigma * sigma))
}
