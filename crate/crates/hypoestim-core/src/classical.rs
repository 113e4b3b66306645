//! Reference estimators for fully observed paths, used as cross-checks for
//! the Gibbs machinery rather than as components of it.

use crate::model::Path;
use crate::Error;

/// Realized quadratic variation rate: (1/T) Σ (v_{n+1} − v_n)².
///
/// Note the normalization is by total time T, not by the step count or the
/// step size; for a diffusion with coefficient σ this converges to σ².
pub fn quadratic_variation(v: &[f64], t: f64) -> Result<f64, Error> {
    if v.len() < 2 {
        return Err(Error::InvalidArgument("need at least two values"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument("T must be positive and finite"));
    }
    let mut acc = 0.0;
    for w in v.windows(2) {
        let d = w[1] - w[0];
        acc += d * d;
    }
    Ok(acc / t)
}

/// Discretized whole-drift-matrix least-squares estimator for a linear
/// system dx = Θx dt + noise, from full observation of x = (q, p):
///
/// ```text
///   Θ̂ = [Σ Δx_n x_nᵀ] [Σ x_n x_nᵀ Δt]⁻¹
/// ```
///
/// For the harmonic model the target is Θ = [[0, 1], [−D, −γ]]. Only
/// meaningful for linear drift; nothing here checks the model, the caller
/// chooses the data.
pub fn lebreton_drift(path: &Path) -> Result<[[f64; 2]; 2], Error> {
    let p = path.rough()?;
    let n = path.n_steps();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two increments"));
    }
    let dt = path.dt;
    // A = Σ Δx xᵀ, G = Σ x xᵀ Δt (symmetric).
    let mut a = [[0.0f64; 2]; 2];
    let mut g = [[0.0f64; 2]; 2];
    for i in 0..n {
        let x = [path.q[i], p[i]];
        let dx = [path.q[i + 1] - x[0], p[i + 1] - x[1]];
        for r in 0..2 {
            for c in 0..2 {
                a[r][c] += dx[r] * x[c];
                g[r][c] += x[r] * x[c] * dt;
            }
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let scale = g[0][0].abs().max(g[1][1].abs());
    if det.abs() <= 1e-13 * scale * scale || !det.is_finite() {
        return Err(Error::IllConditioned("singular Gram matrix"));
    }
    let ginv = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let mut theta = [[0.0f64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            theta[r][c] = a[r][0] * ginv[0][c] + a[r][1] * ginv[1][c];
        }
    }
    Ok(theta)
}
