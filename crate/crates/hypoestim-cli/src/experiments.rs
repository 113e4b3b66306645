//! Repetition-averaged experiment drivers.
//!
//! Every driver splits one master seed into per-repetition seeds with
//! `derive_seed(master, index)` (data stream at `2·index`, sampler stream at
//! `2·index + 1` where both exist, `index = cell·reps + rep`), so results are
//! reproducible for a given seed and repetition count no matter how rayon
//! schedules the repetitions.

use rayon::prelude::*;

use hypoestim_core::gibbs::{posterior_means, run_gibbs, GibbsConfig, SigmaSampler};
use hypoestim_core::likelihood::nd_impute;
use hypoestim_core::model::{DriftParams, ModelSpec};
use hypoestim_core::rng::derive_seed;
use hypoestim_core::samplers::{drift_mle_ito, mle_sigma_quadvar};
use hypoestim_core::simulate::{
    euler_fine_path, exact_growth_path, exact_harmonic_path, SimConfig,
};
use hypoestim_core::stats::{mean, sample_sd};

use crate::Failure;

/// One cell of the finite-difference imputation study: σ̂ draws for one
/// (observation mode, spacing) combination.
#[derive(Clone, Debug)]
pub struct NdBiasCell {
    /// "full" (true rough path) or "nd" (finite-difference reconstruction).
    pub observation: &'static str,
    pub dt: f64,
    pub n_steps: usize,
    pub sigma_hats: Vec<f64>,
}

/// Quadratic-variation σ̂ on Growth data, full versus finite-difference
/// observation, at the coarse (Δt=0.1, N=100) and fine (Δt=0.01, N=10⁴)
/// settings. The two observation modes of a setting share data paths, so
/// their contrast is purely the imputation.
///
/// Returns four cells in the order full/nd at Δt=0.1, then full/nd at
/// Δt=0.01.
pub fn nd_bias_demo(sigma: f64, reps: usize, seed: u64) -> Result<Vec<NdBiasCell>, Failure> {
    if reps == 0 {
        return Err(Failure::Usage("repetitions must be at least 1".into()));
    }
    let settings = [(0.1, 100usize), (0.01, 10_000usize)];
    let mut cells = Vec::with_capacity(4);
    for (cell, &(dt, n_steps)) in settings.iter().enumerate() {
        let pairs: Vec<(f64, f64)> = (0..reps)
            .into_par_iter()
            .map(|rep| -> Result<(f64, f64), Failure> {
                let cfg = SimConfig {
                    spec: ModelSpec::growth(),
                    theta: DriftParams::default(),
                    sigma,
                    dt,
                    n_steps,
                    subsample: 1,
                    x0: (0.0, 1.0),
                    seed: derive_seed(seed, (cell * reps + rep) as u64),
                };
                let path = exact_growth_path(&cfg)?;
                let p = path.rough()?;
                let full = mle_sigma_quadvar(p, dt)?;
                let nd = mle_sigma_quadvar(&nd_impute(&path.q, dt)?, dt)?;
                Ok((full, nd))
            })
            .collect::<Result<_, _>>()?;
        cells.push(NdBiasCell {
            observation: "full",
            dt,
            n_steps,
            sigma_hats: pairs.iter().map(|x| x.0).collect(),
        });
        cells.push(NdBiasCell {
            observation: "nd",
            dt,
            n_steps,
            sigma_hats: pairs.iter().map(|x| x.1).collect(),
        });
    }
    Ok(cells)
}

/// Configuration for [`lit_drift_demo`].
#[derive(Clone, Debug)]
pub struct LitDriftConfig {
    pub d: f64,
    pub gamma: f64,
    pub sigma: f64,
    /// Observation spacings; crossed with `t_finals`.
    pub dts: Vec<f64>,
    pub t_finals: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for LitDriftConfig {
    fn default() -> Self {
        LitDriftConfig {
            d: 4.0,
            gamma: 0.5,
            sigma: 0.5,
            dts: vec![0.002, 0.0005],
            t_finals: vec![100.0, 400.0],
            reps: 50,
            seed: 0,
        }
    }
}

/// One (Δt, T) cell of drift estimates from the broken Itô-Taylor
/// maximum-likelihood equations.
#[derive(Clone, Debug)]
pub struct LitDriftCell {
    pub dt: f64,
    pub t_final: f64,
    pub d_hats: Vec<f64>,
    pub gamma_hats: Vec<f64>,
}

/// Runs [`drift_mle_ito`] on fully observed exact harmonic data over the
/// (Δt × T) grid. The point of the exercise is the estimator clustering near
/// a quarter of the truth at every grid cell; refinement in Δt or T does not
/// repair it.
pub fn lit_drift_demo(cfg: &LitDriftConfig) -> Result<Vec<LitDriftCell>, Failure> {
    if cfg.reps == 0 {
        return Err(Failure::Usage("repetitions must be at least 1".into()));
    }
    if cfg.dts.is_empty() || cfg.t_finals.is_empty() {
        return Err(Failure::Usage("need at least one spacing and one horizon".into()));
    }
    let theta = DriftParams::new(vec![cfg.d], cfg.gamma).map_err(Failure::from)?;
    let mut cells = Vec::new();
    let mut cell_idx = 0usize;
    for &dt in &cfg.dts {
        for &t_final in &cfg.t_finals {
            let n_steps = steps_for(t_final, dt)?;
            let ests: Vec<(f64, f64)> = (0..cfg.reps)
                .into_par_iter()
                .map(|rep| -> Result<(f64, f64), Failure> {
                    let sim = SimConfig {
                        spec: ModelSpec::harmonic(),
                        theta: theta.clone(),
                        sigma: cfg.sigma,
                        dt,
                        n_steps,
                        subsample: 1,
                        x0: (0.0, 0.0),
                        seed: derive_seed(cfg.seed, (cell_idx * cfg.reps + rep) as u64),
                    };
                    let path = exact_harmonic_path(&sim)?;
                    Ok(drift_mle_ito(&path)?)
                })
                .collect::<Result<_, _>>()?;
            cells.push(LitDriftCell {
                dt,
                t_final,
                d_hats: ests.iter().map(|e| e.0).collect(),
                gamma_hats: ests.iter().map(|e| e.1).collect(),
            });
            cell_idx += 1;
        }
    }
    Ok(cells)
}

/// Data-and-sampler settings shared by every Δt cell of a bias sweep.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub spec: ModelSpec,
    pub theta_true: DriftParams,
    pub sigma_true: f64,
    pub t_final: f64,
    /// Observation spacings, one [`SweepRecord`] each.
    pub dts: Vec<f64>,
    pub x0: (f64, f64),
    /// The data generator integrates at dt/k with k chosen so the fine step
    /// is at most this; keeps simulation bias flat across the Δt grid.
    pub fine_step_target: f64,
    pub n_gibbs: usize,
    pub burn_frac: f64,
    pub sigma_sampler: SigmaSampler,
    pub sigma_init: f64,
}

impl SweepGrid {
    pub fn new(
        spec: ModelSpec,
        theta_true: DriftParams,
        sigma_true: f64,
        t_final: f64,
        dts: Vec<f64>,
    ) -> Self {
        SweepGrid {
            spec,
            theta_true,
            sigma_true,
            t_final,
            dts,
            x0: (0.0, 0.0),
            fine_step_target: 1.0 / 1024.0,
            n_gibbs: 50,
            burn_frac: 0.5,
            sigma_sampler: SigmaSampler::Langevin,
            sigma_init: 1.0,
        }
    }
}

/// Aggregated posterior means at one observation spacing.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub dt: f64,
    pub repetitions: usize,
    /// Repetition averages of the posterior means.
    pub mean_d: Vec<f64>,
    pub mean_gamma: f64,
    pub mean_sigma: f64,
    /// Monte-Carlo spread across repetitions (sample SD of the posterior
    /// means, not divided by √reps).
    pub sd_d: Vec<f64>,
    pub sd_gamma: f64,
    pub sd_sigma: f64,
    /// Averages minus the generating parameters.
    pub dev_d: Vec<f64>,
    pub dev_gamma: f64,
    pub dev_sigma: f64,
    /// A single repetition makes every SD identically 0.
    pub degenerate: bool,
}

/// For each Δt: simulate `repetitions` fresh data sets, fit each with the
/// Gibbs sampler, and aggregate the posterior means. Records come back in
/// the grid's Δt order.
pub fn bias_sweep(
    grid: &SweepGrid,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<SweepRecord>, Failure> {
    if repetitions == 0 {
        return Err(Failure::Usage("repetitions must be at least 1".into()));
    }
    if grid.dts.is_empty() {
        return Err(Failure::Usage("need at least one observation spacing".into()));
    }
    if !(grid.fine_step_target > 0.0) || !grid.fine_step_target.is_finite() {
        return Err(Failure::Usage("fine step target must be positive".into()));
    }
    let n_params = grid.theta_true.d.len();
    let mut records = Vec::with_capacity(grid.dts.len());
    for (dt_idx, &dt) in grid.dts.iter().enumerate() {
        let n_steps = steps_for(grid.t_final, dt)?;
        let k_fine = (dt / grid.fine_step_target).ceil().max(1.0) as usize;
        let fits: Vec<(DriftParams, f64)> = (0..repetitions)
            .into_par_iter()
            .map(|rep| -> Result<(DriftParams, f64), Failure> {
                let idx = (dt_idx * repetitions + rep) as u64;
                let sim = SimConfig {
                    spec: grid.spec,
                    theta: grid.theta_true.clone(),
                    sigma: grid.sigma_true,
                    dt,
                    n_steps,
                    subsample: k_fine,
                    x0: grid.x0,
                    seed: derive_seed(seed, 2 * idx),
                };
                let path = euler_fine_path(&sim)?;
                let mut gc = GibbsConfig::new(grid.spec, dt);
                gc.n_gibbs = grid.n_gibbs;
                gc.burn_frac = grid.burn_frac;
                gc.sigma_init = grid.sigma_init;
                gc.sigma_sampler = grid.sigma_sampler;
                gc.seed = derive_seed(seed, 2 * idx + 1);
                let chain = run_gibbs(&path.q, &gc)?;
                Ok(posterior_means(&chain)?)
            })
            .collect::<Result<_, _>>()?;

        let sigma_hats: Vec<f64> = fits.iter().map(|f| f.1).collect();
        let gamma_hats: Vec<f64> = fits.iter().map(|f| f.0.gamma).collect();
        let degenerate = repetitions == 1;
        let spread = |xs: &[f64]| if degenerate { 0.0 } else { sample_sd(xs) };
        let mut mean_d = Vec::with_capacity(n_params);
        let mut sd_d = Vec::with_capacity(n_params);
        let mut dev_d = Vec::with_capacity(n_params);
        for j in 0..n_params {
            let col: Vec<f64> = fits.iter().map(|f| f.0.d[j]).collect();
            let m = mean(&col);
            mean_d.push(m);
            sd_d.push(spread(&col));
            dev_d.push(m - grid.theta_true.d[j]);
        }
        let mean_gamma = if n_params == 0 { 0.0 } else { mean(&gamma_hats) };
        let mean_sigma = mean(&sigma_hats);
        records.push(SweepRecord {
            dt,
            repetitions,
            mean_d,
            mean_gamma,
            mean_sigma,
            sd_d,
            sd_gamma: if n_params == 0 { 0.0 } else { spread(&gamma_hats) },
            sd_sigma: spread(&sigma_hats),
            dev_d,
            dev_gamma: mean_gamma - grid.theta_true.gamma,
            dev_sigma: mean_sigma - grid.sigma_true,
            degenerate,
        });
    }
    Ok(records)
}

fn steps_for(t_final: f64, dt: f64) -> Result<usize, Failure> {
    if !(dt > 0.0) || !dt.is_finite() || !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Failure::Usage("horizon and spacing must be positive and finite".into()));
    }
    let n = (t_final / dt).round();
    if n < 2.0 {
        return Err(Failure::Usage("horizon shorter than two observation steps".into()));
    }
    Ok(n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_nd_demo_shape_and_determinism() {
        let cells = nd_bias_demo(1.0, 8, 7).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0].observation, "full");
        assert_eq!(cells[1].observation, "nd");
        assert_eq!(cells[0].dt, 0.1);
        assert_eq!(cells[2].dt, 0.01);
        for c in &cells {
            assert_eq!(c.sigma_hats.len(), 8);
        }
        let again = nd_bias_demo(1.0, 8, 7).unwrap();
        assert_eq!(cells[3].sigma_hats, again[3].sigma_hats);
        let other = nd_bias_demo(1.0, 8, 8).unwrap();
        assert_ne!(cells[3].sigma_hats, other[3].sigma_hats);
    }

    #[test]
    fn test_nd_demo_bias_direction() {
        // Finite-difference cells sit clearly below the full-observation
        // cells; at Δt=0.01 the full cell is within a few percent of σ.
        let cells = nd_bias_demo(1.0, 30, 123).unwrap();
        let m = |c: &NdBiasCell| mean(&c.sigma_hats);
        assert!(m(&cells[1]) < m(&cells[0]) - 0.1);
        assert!(m(&cells[3]) < m(&cells[2]) - 0.1);
        assert!((m(&cells[2]) - 1.0).abs() < 0.05);
    }

    #[test]
    fn test_lit_drift_demo_quarters() {
        let cfg = LitDriftConfig {
            dts: vec![0.002],
            t_finals: vec![100.0],
            reps: 10,
            seed: 5,
            ..LitDriftConfig::default()
        };
        let cells = lit_drift_demo(&cfg).unwrap();
        assert_eq!(cells.len(), 1);
        let d_mean = mean(&cells[0].d_hats);
        let g_mean = mean(&cells[0].gamma_hats);
        assert!((d_mean - 1.0).abs() < 0.4, "D mean {d_mean}");
        assert!((g_mean - 0.125).abs() < 0.1, "gamma mean {g_mean}");
    }

    #[test]
    fn test_sweep_single_rep_degenerate() {
        let grid = SweepGrid::new(
            ModelSpec::growth(),
            DriftParams::default(),
            1.0,
            20.0,
            vec![0.1],
        );
        let recs = bias_sweep(&grid, 1, 3).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].degenerate);
        assert_eq!(recs[0].sd_sigma, 0.0);
        assert!(recs[0].mean_sigma > 0.0);
        assert!(recs[0].mean_d.is_empty());
    }

    #[test]
    fn test_sweep_growth_sigma_recovery() {
        let grid = SweepGrid::new(
            ModelSpec::growth(),
            DriftParams::default(),
            1.0,
            50.0,
            vec![0.05, 0.025],
        );
        let recs = bias_sweep(&grid, 4, 11).unwrap();
        assert_eq!(recs.len(), 2);
        for r in &recs {
            assert!(
                r.dev_sigma.abs() < 0.1,
                "sigma deviation {} at dt {}",
                r.dev_sigma,
                r.dt
            );
            assert!(!r.degenerate);
            assert!(r.sd_sigma > 0.0);
        }
    }

    #[test]
    fn test_input_guards() {
        assert_eq!(nd_bias_demo(1.0, 0, 0).unwrap_err().exit_code(), 2);
        let grid = SweepGrid::new(
            ModelSpec::growth(),
            DriftParams::default(),
            1.0,
            10.0,
            vec![],
        );
        assert_eq!(bias_sweep(&grid, 5, 0).unwrap_err().exit_code(), 2);
        let cfg = LitDriftConfig { reps: 0, ..LitDriftConfig::default() };
        assert_eq!(lit_drift_demo(&cfg).unwrap_err().exit_code(), 2);
    }
}
