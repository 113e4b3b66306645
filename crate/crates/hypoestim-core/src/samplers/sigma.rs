//! Diffusion-coefficient block. The target is the σ posterior implied by
//! the Itô-Taylor likelihood with flat prior,
//!
//! ```text
//!   p(σ | P, θ) ∝ σ^{−2N} exp(−Z / (2σ²)),
//! ```
//!
//! sampled two ways: a Langevin SDE in ζ = σ⁴ (the production route, the
//! substitution removes the σ = 0 singularity) and a conjugate inverse-gamma
//! draw kept as a permanent distributional oracle.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::math;
use crate::rng::Prng;
use crate::Error;

/// Reflection floor for ζ = σ⁴; keeps the chain off the σ = 0 boundary.
/// Corresponds to σ ≥ 10⁻³, far below any plausible posterior mass.
const ZETA_MIN: f64 = 1e-12;

/// ζ beyond this is treated as divergence of the explicit scheme.
const ZETA_OVERFLOW: f64 = 1e300;

/// Quadratic-variation estimate of σ from an observed (or imputed) rough
/// path: σ̂² = Σ (ΔP_n)² / (M Δt) over the M = len−1 increments; returns σ̂.
pub fn mle_sigma_quadvar(p: &[f64], dt: f64) -> Result<f64, Error> {
    if p.len() < 2 {
        return Err(Error::InvalidArgument("need at least two rough-path values"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument("dt must be positive and finite"));
    }
    let mut acc = 0.0;
    for w in p.windows(2) {
        let d = w[1] - w[0];
        acc += d * d;
    }
    let var = acc / ((p.len() - 1) as f64 * dt);
    if !var.is_finite() {
        return Err(Error::NonFinite("quadratic variation"));
    }
    Ok(math::sqrt(var))
}

/// Step size and step count for the σ-Langevin integrator.
///
/// The SDE linearized at its stationary point √ζ* = 4Z/(8N−12) relaxes at
/// rate λ = (8N−12)²/(8Z); we integrate 30 relaxation times with
/// ds = 10⁻³ / max(N, Z), which keeps the deterministic per-step update a
/// small fraction of the state everywhere on the admissible (Z, N) range.
/// Ten relaxation times equilibrate a warm start, but a chain started far
/// from the mode spends several of them on the deterministic pull-in, and
/// the leftover initialization bias is resolvable in two-sample tests at
/// 10⁴ draws; 30 buries it.
pub fn langevin_step_plan(z: f64, n: usize) -> Result<(f64, usize), Error> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two increments"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument("Z must be positive and finite"));
    }
    let nf = n as f64;
    let ds = 1e-3 / nf.max(z);
    let rate = (8.0 * nf - 12.0) * (8.0 * nf - 12.0) / (8.0 * z);
    let n_steps = math::ceil_usize(30.0 / (rate * ds));
    Ok((ds, n_steps.max(1)))
}

/// Explicit Euler-Maruyama integration of
///
/// ```text
///   dζ = ((12 − 8N)√ζ + 4Z) ds + 4√2 ζ^{3/4} dW,     ζ = σ⁴,
/// ```
///
/// reflecting at [`ZETA_MIN`], started from `sigma_init⁴`; returns
/// σ = ζ^{1/4} after `n_steps` steps. Step size is the caller's problem
/// here; [`sample_sigma_langevin_auto`] applies the tuned plan.
pub fn sample_sigma_langevin(
    z: f64,
    n: usize,
    sigma_init: f64,
    ds: f64,
    n_steps: usize,
    rng: &mut Prng,
) -> Result<f64, Error> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two increments"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument("Z must be positive and finite"));
    }
    if !(sigma_init > 0.0) || !sigma_init.is_finite() {
        return Err(Error::InvalidArgument("sigma_init must be positive and finite"));
    }
    if !(ds > 0.0) || !ds.is_finite() || n_steps == 0 {
        return Err(Error::InvalidArgument("bad Langevin step plan"));
    }
    let mut zeta = sigma_init * sigma_init * sigma_init * sigma_init;
    if zeta < ZETA_MIN {
        zeta = ZETA_MIN;
    }
    let pull = 12.0 - 8.0 * n as f64;
    let amp = 4.0 * core::f64::consts::SQRT_2 * math::sqrt(ds);
    for _ in 0..n_steps {
        let xi: f64 = rng.sample(StandardNormal);
        // ζ^{3/4} as √(ζ·√ζ): two sqrts beat a powf in the hot loop.
        let root = math::sqrt(zeta);
        zeta += (pull * root + 4.0 * z) * ds + amp * math::sqrt(zeta * root) * xi;
        if zeta < ZETA_MIN {
            zeta = 2.0 * ZETA_MIN - zeta;
        }
        if !zeta.is_finite() || zeta > ZETA_OVERFLOW {
            return Err(Error::StepSizeTooLarge);
        }
    }
    Ok(math::powf(zeta, 0.25))
}

/// [`sample_sigma_langevin`] with the step plan from [`langevin_step_plan`].
pub fn sample_sigma_langevin_auto(
    z: f64,
    n: usize,
    sigma_init: f64,
    rng: &mut Prng,
) -> Result<f64, Error> {
    let (ds, n_steps) = langevin_step_plan(z, n)?;
    sample_sigma_langevin(z, n, sigma_init, ds, n_steps, rng)
}

/// Conjugate draw from the same posterior: in τ = σ² the density is
/// inverse-gamma with shape N − 1/2 and scale Z/2, so τ = (Z/2)/G with
/// G ~ Gamma(N − 1/2, 1).
pub fn sample_sigma_direct(z: f64, n: usize, rng: &mut Prng) -> Result<f64, Error> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two increments"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument("Z must be positive and finite"));
    }
    let gamma = Gamma::new(n as f64 - 0.5, 1.0)
        .map_err(|_| Error::InvalidArgument("gamma shape out of range"))?;
    let g: f64 = gamma.sample(rng);
    Ok(math::sqrt(0.5 * z / g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_seed, new_rng};
    use crate::simulate::{exact_growth_path, SimConfig};
    use crate::stats::{ks_critical_1pct, ks_statistic};
    use crate::ModelSpec;
    use alloc::vec::Vec;

    #[test]
    fn test_quadvar_hand_value() {
        // P = (0,1,3), dt = 0.5: Σ(ΔP)² = 5 over M = 2 increments,
        // σ̂² = 5/(2·0.5) = 5.
        let got = mle_sigma_quadvar(&[0.0, 1.0, 3.0], 0.5).unwrap();
        assert!((got - 5.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn test_quadvar_input_checks() {
        assert!(mle_sigma_quadvar(&[1.0], 0.1).is_err());
        assert!(mle_sigma_quadvar(&[1.0, 2.0], 0.0).is_err());
    }

    fn growth_cfg(seed: u64) -> SimConfig {
        SimConfig {
            spec: ModelSpec::growth(),
            theta: Default::default(),
            sigma: 1.0,
            dt: 0.01,
            n_steps: 10_000,
            subsample: 1,
            x0: (0.0, 0.0),
            seed,
        }
    }

    #[test]
    fn test_quadvar_consistent_on_true_rough_path() {
        let path = exact_growth_path(&growth_cfg(2)).unwrap();
        let sigma_hat = mle_sigma_quadvar(path.p.as_ref().unwrap(), path.dt).unwrap();
        // χ² CLT: σ̂² within 1.645·√(2/N) of 1 at ~90% confidence; fixed seed.
        let band = 1.645 * (2.0f64 / 10_000.0).sqrt();
        assert!(
            (sigma_hat * sigma_hat - 1.0).abs() < band,
            "sigma^2 = {}",
            sigma_hat * sigma_hat
        );
    }

    #[test]
    fn test_step_plan_values() {
        let (ds, n_steps) = langevin_step_plan(200.0, 100).unwrap();
        assert_eq!(ds, 1e-3 / 200.0);
        // 30τ/ds with τ = 8·200/788²: about 1.55e4 steps.
        assert!((15000..15900).contains(&n_steps), "n_steps = {n_steps}");
        // Z smaller than N: ds pinned by N instead.
        let (ds, _) = langevin_step_plan(50.0, 100).unwrap();
        assert_eq!(ds, 1e-5);
        assert!(langevin_step_plan(0.0, 100).is_err());
        assert!(langevin_step_plan(10.0, 1).is_err());
    }

    // Simpson integration of moments of the unnormalized density
    // exp(−2N ln σ − Z/(2σ²)) — the quadrature oracle for both samplers.
    fn quadrature_moments(z: f64, n: usize) -> (f64, f64) {
        let mode = (z / (2.0 * n as f64)).sqrt();
        let lo = 0.2 * mode;
        let hi = 4.0 * mode;
        let segments = 4000;
        let h = (hi - lo) / segments as f64;
        let logf = |s: f64| -2.0 * (n as f64) * s.ln() - z / (2.0 * s * s);
        let log0 = logf(mode);
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for i in 0..=segments {
            let s = lo + i as f64 * h;
            let w = if i == 0 || i == segments {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let f = (logf(s) - log0).exp() * w;
            m0 += f;
            m1 += f * s;
            m2 += f * s * s;
        }
        (m1 / m0, m2 / m0)
    }

    #[test]
    fn test_direct_sampler_matches_quadrature_moments() {
        let z = 200.0;
        let n = 100;
        let (want_mean, want_m2) = quadrature_moments(z, n);
        let draws = 200_000;
        let mut rng = new_rng(314159);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let s = sample_sigma_direct(z, n, &mut rng).unwrap();
            s1 += s;
            s2 += s * s;
        }
        let nf = draws as f64;
        let mean = s1 / nf;
        let m2 = s2 / nf;
        let var = m2 - mean * mean;
        let se_mean = (var / nf).sqrt();
        assert!(
            (mean - want_mean).abs() < 4.0 * se_mean,
            "mean {mean} vs quadrature {want_mean}"
        );
        // Second moment too: E[σ²] matches quadrature to 1%.
        assert!(
            ((m2 - want_m2) / want_m2).abs() < 0.01,
            "E sigma^2 = {m2} vs quadrature {want_m2}"
        );
    }

    #[test]
    fn test_direct_sampler_mode_location() {
        // Histogram mode of many draws should sit near σ* = √(Z/2N).
        let z = 800.0;
        let n = 100;
        let mode = (z / (2.0 * n as f64)).sqrt();
        let mut rng = new_rng(8);
        let draws: Vec<f64> = (0..50_000)
            .map(|_| sample_sigma_direct(z, n, &mut rng).unwrap())
            .collect();
        let mut hist = [0usize; 40];
        let lo = 0.5 * mode;
        let hi = 1.5 * mode;
        for d in &draws {
            if *d >= lo && *d < hi {
                let b = ((d - lo) / (hi - lo) * 40.0) as usize;
                hist[b.min(39)] += 1;
            }
        }
        let best = hist.iter().enumerate().max_by_key(|(_, c)| **c).unwrap().0;
        let center = lo + (best as f64 + 0.5) / 40.0 * (hi - lo);
        assert!(
            (center - mode).abs() < 0.1 * mode,
            "histogram mode {center} vs analytic {mode}"
        );
    }

    #[test]
    fn test_direct_sampler_z_scaling_is_exact() {
        // Z → 4Z with the same RNG stream doubles every draw exactly.
        let mut ra = new_rng(42);
        let mut rb = new_rng(42);
        for _ in 0..1000 {
            let a = sample_sigma_direct(150.0, 80, &mut ra).unwrap();
            let b = sample_sigma_direct(600.0, 80, &mut rb).unwrap();
            assert_eq!(2.0 * a, b);
        }
    }

    #[test]
    fn test_langevin_agrees_with_direct_ks() {
        // One (Z, N) cell here; the acceptance suite sweeps the full grid.
        let z = 200.0;
        let n = 100;
        let draws = 4000;
        let mode = (z / (2.0 * n as f64)).sqrt();
        let mut langevin = Vec::with_capacity(draws);
        for i in 0..draws {
            let mut rng = new_rng(derive_seed(1001, i as u64));
            langevin.push(sample_sigma_langevin_auto(z, n, 2.0 * mode, &mut rng).unwrap());
        }
        let mut rng = new_rng(2002);
        let direct: Vec<f64> = (0..draws)
            .map(|_| sample_sigma_direct(z, n, &mut rng).unwrap())
            .collect();
        let ks = ks_statistic(&langevin, &direct);
        let crit = ks_critical_1pct(draws, draws);
        assert!(ks < crit, "KS {ks} >= critical {crit}");
    }

    #[test]
    fn test_langevin_mean_matches_direct_at_z_2n() {
        let n = 1000;
        let z = 2.0 * n as f64;
        let draws = 2000;
        let mut sum_l = 0.0;
        for i in 0..draws {
            let mut rng = new_rng(derive_seed(77, i));
            sum_l += sample_sigma_langevin_auto(z, n, 1.0, &mut rng).unwrap();
        }
        let mut rng = new_rng(78);
        let (mut sum_d, mut sum_d2) = (0.0, 0.0);
        for _ in 0..draws {
            let s = sample_sigma_direct(z, n, &mut rng).unwrap();
            sum_d += s;
            sum_d2 += s * s;
        }
        let nf = draws as f64;
        let mean_l = sum_l / nf;
        let mean_d = sum_d / nf;
        let var = sum_d2 / nf - mean_d * mean_d;
        let se = (2.0 * var / nf).sqrt();
        assert!((mean_l - 1.0).abs() < 0.05, "not concentrated near 1: {mean_l}");
        assert!(
            (mean_l - mean_d).abs() < 3.0 * se,
            "Langevin mean {mean_l} vs direct {mean_d} (se {se})"
        );
    }

    #[test]
    fn test_langevin_overflow_guard() {
        let mut rng = new_rng(3);
        let got = sample_sigma_langevin(1e8, 2, 1.0, 1e150, 200, &mut rng);
        assert_eq!(got, Err(Error::StepSizeTooLarge));
    }

    #[test]
    fn test_langevin_survives_floor() {
        // Absurdly small Z parks the chain at the reflection floor; the
        // result must still be finite and positive.
        let mut rng = new_rng(4);
        let s = sample_sigma_langevin_auto(1e-10, 2, 1e-6, &mut rng).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn test_sampler_input_checks() {
        let mut rng = new_rng(0);
        assert!(sample_sigma_direct(0.0, 10, &mut rng).is_err());
        assert!(sample_sigma_direct(10.0, 1, &mut rng).is_err());
        assert!(sample_sigma_langevin(10.0, 10, 0.0, 1e-5, 10, &mut rng).is_err());
        assert!(sample_sigma_langevin(10.0, 10, 1.0, 0.0, 10, &mut rng).is_err());
        assert!(sample_sigma_langevin(10.0, 10, 1.0, 1e-5, 0, &mut rng).is_err());
    }
}
