//! Converts posterior drift samples into the stationary position density
//! of the periodic model, with pointwise uncertainty across the samples.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::model::DriftParams;
use crate::Error;

/// Pointwise posterior mean and SD of the invariant position density
///
/// ```text
///   ρ(q) ∝ exp(−(2γ/σ²) V(q)),    V(q) = −Σ_j (D_j/j) cosʲ(q),
/// ```
///
/// where the drift coefficients are read in the periodic force basis
/// (V′(q) = Σ_j D_j sin(q) cosʲ⁻¹(q)). Each sample's density is normalized
/// by trapezoidal quadrature on the supplied grid, which must be sorted,
/// have at least 16 points and stay inside [−π, π].
pub fn invariant_density(
    theta_samples: &[DriftParams],
    sigma: f64,
    grid: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), Error> {
    if theta_samples.is_empty() {
        return Err(Error::InvalidArgument("no drift samples"));
    }
    if grid.len() < 16 {
        return Err(Error::InvalidArgument("grid needs at least 16 points"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument("sigma must be positive and finite"));
    }
    let bound = core::f64::consts::PI + 1e-12;
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument("grid must be strictly increasing"));
        }
    }
    if grid[0] < -bound || grid[grid.len() - 1] > bound {
        return Err(Error::InvalidArgument("grid must lie inside [-pi, pi]"));
    }

    let m = grid.len();
    let mut mean = vec![0.0; m];
    let mut msq = vec![0.0; m];
    let mut logw = vec![0.0; m];
    let prefactor = 2.0 / (sigma * sigma);
    for theta in theta_samples {
        let scale = prefactor * theta.gamma;
        let mut peak = f64::NEG_INFINITY;
        for (lw, &q) in logw.iter_mut().zip(grid) {
            let c = math::cos(q);
            let mut v = 0.0;
            let mut cpow = 1.0;
            for (j, d) in theta.d.iter().enumerate() {
                cpow *= c;
                v -= d / (j as f64 + 1.0) * cpow;
            }
            *lw = -scale * v;
            if *lw > peak {
                peak = *lw;
            }
        }
        if !peak.is_finite() {
            return Err(Error::NonFinite("density exponent"));
        }
        for lw in logw.iter_mut() {
            *lw = math::exp(*lw - peak);
        }
        let mut integral = 0.0;
        for i in 0..m - 1 {
            integral += 0.5 * (logw[i] + logw[i + 1]) * (grid[i + 1] - grid[i]);
        }
        for i in 0..m {
            let rho = logw[i] / integral;
            mean[i] += rho;
            msq[i] += rho * rho;
        }
    }
    let n = theta_samples.len() as f64;
    let mut sd = msq;
    for i in 0..m {
        mean[i] /= n;
        let var = if theta_samples.len() > 1 {
            (sd[i] - n * mean[i] * mean[i]) / (n - 1.0)
        } else {
            0.0
        };
        sd[i] = math::sqrt(var.max(0.0));
    }
    Ok((mean, sd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpec;
    use crate::simulate::{euler_fine_path, SimConfig};
    use core::f64::consts::PI;

    fn full_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64).collect()
    }

    fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
        (0..grid.len() - 1)
            .map(|i| 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]))
            .sum()
    }

    #[test]
    fn test_zero_potential_is_uniform() {
        let grid = full_grid(64);
        let flat = DriftParams { d: vec![0.0, 0.0, 0.0], gamma: 0.7 };
        let (mean, sd) = invariant_density(&[flat.clone(), flat], 0.9, &grid).unwrap();
        for (m, s) in mean.iter().zip(&sd) {
            assert!((m - 1.0 / (2.0 * PI)).abs() < 1e-12, "density {m}");
            assert_eq!(*s, 0.0);
        }
        // γ = 0 kills the exponent the same way.
        let no_friction = DriftParams { d: vec![3.0], gamma: 0.0 };
        let (mean, _) = invariant_density(&[no_friction], 0.9, &grid).unwrap();
        assert!((mean[5] - 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn test_each_mean_density_normalized() {
        let grid = full_grid(257);
        let samples = [
            DriftParams { d: vec![1.0, -8.0, 8.0], gamma: 0.5 },
            DriftParams { d: vec![1.2, -7.0, 7.5], gamma: 0.6 },
            DriftParams { d: vec![0.8, -9.0, 8.5], gamma: 0.4 },
        ];
        let (mean, sd) = invariant_density(&samples, 0.7, &grid).unwrap();
        assert!((trapezoid(&grid, &mean) - 1.0).abs() < 1e-12);
        assert!(sd.iter().any(|s| *s > 0.0), "distinct samples must disagree somewhere");
        assert!(mean.iter().all(|m| *m >= 0.0));
    }

    #[test]
    fn test_single_term_density_symmetric_and_peaked() {
        // V = −D cos(q): even potential with minimum at q = 0 for D > 0,
        // so the density is symmetric and peaks at the center.
        let grid = full_grid(129);
        let theta = DriftParams { d: vec![2.0], gamma: 0.8 };
        let (mean, _) = invariant_density(&[theta], 1.0, &grid).unwrap();
        let m = grid.len();
        for i in 0..m / 2 {
            assert!(
                (mean[i] - mean[m - 1 - i]).abs() < 1e-12,
                "asymmetry at {i}: {} vs {}",
                mean[i],
                mean[m - 1 - i]
            );
        }
        let center = mean[m / 2];
        assert!(mean.iter().all(|v| *v <= center + 1e-12), "peak not at 0");
    }

    #[test]
    fn test_matches_long_run_occupation() {
        // Long trajectory of the periodic model vs the analytic density at
        // the generating parameters: total-variation distance on a wrapped
        // histogram under 0.05.
        let spec = ModelSpec::trig(3).unwrap();
        let theta = DriftParams { d: vec![1.0, -8.0, 8.0], gamma: 0.5 };
        let cfg = SimConfig {
            spec,
            theta: theta.clone(),
            sigma: 0.7,
            dt: 0.05,
            n_steps: 100_000,
            subsample: 10,
            x0: (0.0, 0.0),
            seed: 1234,
        };
        let path = euler_fine_path(&cfg).unwrap();
        let bins = 63;
        let mut hist = vec![0.0f64; bins];
        for q in &path.q {
            let mut w = (q + PI) % (2.0 * PI);
            if w < 0.0 {
                w += 2.0 * PI;
            }
            let b = ((w / (2.0 * PI)) * bins as f64) as usize;
            hist[b.min(bins - 1)] += 1.0;
        }
        let total: f64 = hist.iter().sum();
        for h in hist.iter_mut() {
            *h /= total;
        }
        let centers: Vec<f64> =
            (0..bins).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / bins as f64).collect();
        let (dens, _) = invariant_density(&[theta], 0.7, &centers).unwrap();
        // Normalize the density over the same bin structure before comparing.
        let width = 2.0 * PI / bins as f64;
        let mass: f64 = dens.iter().map(|d| d * width).sum();
        let tv: f64 = hist
            .iter()
            .zip(&dens)
            .map(|(h, d)| (h - d * width / mass).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.05, "total variation {tv}");
    }

    #[test]
    fn test_input_validation() {
        let theta = DriftParams { d: vec![1.0], gamma: 0.5 };
        let small = full_grid(8);
        assert!(invariant_density(&[theta.clone()], 1.0, &small).is_err());
        let grid = full_grid(32);
        assert!(invariant_density(&[], 1.0, &grid).is_err());
        assert!(invariant_density(&[theta.clone()], 0.0, &grid).is_err());
        let wide: Vec<f64> = (0..32).map(|i| -4.0 + 8.0 * i as f64 / 31.0).collect();
        assert!(invariant_density(&[theta.clone()], 1.0, &wide).is_err());
        let unsorted = [0.0, -0.5, 0.5, 1.0, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9, 1.1, 1.2, 1.3, 1.4, 1.5];
        assert!(invariant_density(&[theta], 1.0, &unsorted).is_err());
    }
}
