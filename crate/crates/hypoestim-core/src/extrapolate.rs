//! Weighted linear regression in Δt for removing the O(Δt) estimator bias
//! by extrapolating sweep results to Δt → 0.

use alloc::vec::Vec;

use crate::math;
use crate::Error;

/// Fit of y ≈ b + c·Δt with per-point uncertainties α.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionResult {
    /// Intercept: the extrapolated Δt → 0 value.
    pub b: f64,
    /// Slope in Δt (the leading bias coefficient).
    pub c: f64,
    /// Standard error of the intercept under the stated α.
    pub b_sd: f64,
    /// Standardized residuals (y_i − b − c·Δt_i)/α_i.
    pub residuals: Vec<f64>,
    /// Sum of squared standardized residuals (n − 2 degrees of freedom).
    pub chi2: f64,
}

/// Maximum-likelihood straight-line fit with independent Gaussian errors of
/// known scale α_i (weights 1/α_i²), solved through the 2×2 normal
/// equations in closed form.
pub fn extrapolation_fit(
    dts: &[f64],
    ys: &[f64],
    alphas: &[f64],
) -> Result<RegressionResult, Error> {
    let n = dts.len();
    if ys.len() != n || alphas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ys.len().max(alphas.len()) });
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two points"));
    }
    let (mut sw, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (x, y, a) = (dts[i], ys[i], alphas[i]);
        if !x.is_finite() || !y.is_finite() || !a.is_finite() {
            return Err(Error::NonFinite("regression input"));
        }
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(
                "degenerate uncertainty: alpha must be positive (single-repetition sweeps have no spread)",
            ));
        }
        let w = 1.0 / (a * a);
        sw += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let denom = sw * sxx - sx * sx;
    if !(denom > 1e-13 * sw * sxx.max(1e-300)) {
        return Err(Error::IllConditioned("collinear abscissae in regression"));
    }
    let b = (sxx * sy - sx * sxy) / denom;
    let c = (sw * sxy - sx * sy) / denom;
    let b_sd = math::sqrt(sxx / denom);
    let mut residuals = Vec::with_capacity(n);
    let mut chi2 = 0.0;
    for i in 0..n {
        let r = (ys[i] - b - c * dts[i]) / alphas[i];
        chi2 += r * r;
        residuals.push(r);
    }
    Ok(RegressionResult { b, c, b_sd, residuals, chi2 })
}
