//! The deterministic-scan Gibbs loop over the three blocks
//! (drift | path), (σ | path, drift), (path | drift, σ).

use alloc::vec::Vec;

use crate::likelihood::{ito_taylor_quadform, nd_impute};
use crate::model::{DriftParams, ModelSpec, Path};
use crate::rng::new_rng;
use crate::samplers::{
    drift_posterior, sample_drift, sample_path_direct, sample_sigma_direct,
    sample_sigma_langevin_auto,
};
use crate::Error;

/// Which σ conditional sampler the loop uses. `Langevin` mirrors the
/// reference construction and is the default; `Direct` is the conjugate
/// inverse-gamma draw, exact and much cheaper, kept switchable so the two
/// can be compared on real chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaSampler {
    Langevin,
    Direct,
}

#[derive(Clone, Debug)]
pub struct GibbsConfig {
    pub spec: ModelSpec,
    pub dt: f64,
    pub n_gibbs: usize,
    /// Fraction of the chain discarded by [`posterior_means`]; default 1/2.
    pub burn_frac: f64,
    pub sigma_init: f64,
    pub seed: u64,
    pub sigma_sampler: SigmaSampler,
    /// Keep every per-iteration rough path (memory: n_gibbs × (N+1) floats).
    /// When false only the final path is retained.
    pub store_paths: bool,
}

impl GibbsConfig {
    pub fn new(spec: ModelSpec, dt: f64) -> Self {
        GibbsConfig {
            spec,
            dt,
            n_gibbs: 100,
            burn_frac: 0.5,
            sigma_init: 1.0,
            seed: 0,
            sigma_sampler: SigmaSampler::Langevin,
            store_paths: false,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive and finite"));
        }
        if self.n_gibbs < 2 {
            return Err(Error::InvalidArgument("n_gibbs must be at least 2"));
        }
        if !(self.burn_frac >= 0.0 && self.burn_frac < 1.0) {
            return Err(Error::InvalidArgument("burn_frac must lie in [0, 1)"));
        }
        if !(self.sigma_init > 0.0) || !self.sigma_init.is_finite() {
            return Err(Error::InvalidArgument("sigma_init must be positive and finite"));
        }
        Ok(())
    }
}

/// Everything the loop produced, one entry per iteration, plus the config
/// that made it (so downstream summaries agree on burn-in and model).
#[derive(Clone, Debug)]
pub struct GibbsChain {
    pub thetas: Vec<DriftParams>,
    pub sigmas: Vec<f64>,
    /// All rough paths when `store_paths`, else just the final one.
    pub paths: Vec<Vec<f64>>,
    pub config: GibbsConfig,
}

/// A sampler failure tagged with the iteration it happened in
/// (0 = during setup).
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsError {
    pub iter: usize,
    pub source: Error,
}

impl core::fmt::Display for GibbsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.iter == 0 {
            write!(f, "Gibbs setup: {}", self.source)
        } else {
            write!(f, "Gibbs iteration {}: {}", self.iter, self.source)
        }
    }
}

impl core::error::Error for GibbsError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        Some(&self.source)
    }
}

fn at_iter(iter: usize) -> impl Fn(Error) -> GibbsError {
    move |source| GibbsError { iter, source }
}

/// Runs the full chain on an observed position series.
///
/// Initialization: P⁽⁰⁾ by finite differences, θ⁽⁰⁾ = 0, σ⁽⁰⁾ from the
/// config. Each iteration draws θ from its Euler-likelihood Gaussian
/// posterior (skipped for the driftless Growth model), then σ given the
/// current path and fresh θ, then an exact new path given (θ, σ). The σ
/// Langevin integration warm-starts from the previous σ draw.
pub fn run_gibbs(q: &[f64], cfg: &GibbsConfig) -> Result<GibbsChain, GibbsError> {
    cfg.validate().map_err(at_iter(0))?;
    if q.len() < 3 {
        return Err(GibbsError {
            iter: 0,
            source: Error::InvalidArgument("need at least three observations"),
        });
    }
    let mut p = nd_impute(q, cfg.dt).map_err(at_iter(0))?;
    let mut theta = DriftParams::zeros(&cfg.spec);
    let mut sigma = cfg.sigma_init;
    let has_drift = cfg.spec.param_count() > 0;
    let mut rng = new_rng(cfg.seed);

    let mut thetas = Vec::with_capacity(cfg.n_gibbs);
    let mut sigmas = Vec::with_capacity(cfg.n_gibbs);
    let mut paths = Vec::new();
    for k in 1..=cfg.n_gibbs {
        let fail = at_iter(k);
        let path = Path::new(cfg.dt, q.to_vec(), Some(p)).map_err(&fail)?;
        if has_drift {
            let post = drift_posterior(&path, &cfg.spec, sigma).map_err(&fail)?;
            theta = sample_drift(&post, &mut rng).map_err(&fail)?;
        }
        let z = ito_taylor_quadform(&path, &cfg.spec, &theta).map_err(&fail)?;
        let n = path.n_steps();
        sigma = match cfg.sigma_sampler {
            SigmaSampler::Langevin => sample_sigma_langevin_auto(z, n, sigma, &mut rng),
            SigmaSampler::Direct => sample_sigma_direct(z, n, &mut rng),
        }
        .map_err(&fail)?;
        p = sample_path_direct(q, &cfg.spec, &theta, sigma, cfg.dt, &mut rng).map_err(&fail)?;
        thetas.push(theta.clone());
        sigmas.push(sigma);
        if cfg.store_paths {
            paths.push(p.clone());
        }
    }
    if !cfg.store_paths {
        paths.push(p);
    }
    Ok(GibbsChain { thetas, sigmas, paths, config: cfg.clone() })
}

/// Post-burn-in arithmetic means of θ and σ, using the chain's own config
/// for the burn fraction: draws with index k > burn_frac·n_gibbs survive.
pub fn posterior_means(chain: &GibbsChain) -> Result<(DriftParams, f64), Error> {
    let n = chain.sigmas.len();
    if n == 0 || chain.thetas.len() != n {
        return Err(Error::InvalidArgument("empty or inconsistent chain"));
    }
    let start = (chain.config.burn_frac * n as f64) as usize;
    let start = start.min(n - 1);
    let kept = (n - start) as f64;
    let dim = chain.thetas[0].d.len();
    let mut d = alloc::vec![0.0; dim];
    let mut gamma = 0.0;
    let mut sigma = 0.0;
    for i in start..n {
        let t = &chain.thetas[i];
        if t.d.len() != dim {
            return Err(Error::InvalidArgument("ragged drift draws"));
        }
        for (acc, v) in d.iter_mut().zip(&t.d) {
            *acc += v;
        }
        gamma += t.gamma;
        sigma += chain.sigmas[i];
    }
    for v in d.iter_mut() {
        *v /= kept;
    }
    Ok((DriftParams { d, gamma: gamma / kept }, sigma / kept))
}
