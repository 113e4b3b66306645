//! Bayesian parameter estimation for second-order hypoelliptic diffusions
//! observed discretely and partially (position only, velocity hidden).
//!
//! The model family is
//!
//! ```text
//!     dq = p dt,
//!     dp = (−γ p + f(q; D)) dt + σ dB,
//! ```
//!
//! with three force laws: `Growth` (f ≡ 0, γ = 0), `Harmonic` (f = −D q) and
//! `Trig` (f = −Σ_j D_j sin(q) cos^{j−1}(q)). Only the smooth component q is
//! observed on a regular grid; the rough component p and the parameters
//! (D, γ, σ) are estimated jointly by a deterministic-scan Gibbs sampler:
//!
//! 1. drift (D, γ) from its Gaussian posterior under the Euler likelihood,
//! 2. σ by a Langevin move (or a conjugate direct draw) under the
//!    Itô-Taylor likelihood,
//! 3. the missing p-path exactly, from the tridiagonal Gaussian conditional
//!    of the Itô-Taylor likelihood.
//!
//! The crate is `no_std` + `alloc`; all file formats and drivers live in the
//! companion CLI crate.
//!
//! # Example
//!
//! ```
//! use hypoestim_core::model::ModelSpec;
//! use hypoestim_core::simulate::{exact_growth_path, SimConfig};
//! use hypoestim_core::likelihood::nd_impute;
//! use hypoestim_core::samplers::mle_sigma_quadvar;
//!
//! // Simulate the Growth model exactly, then estimate sigma from the
//! // quadratic variation of a finite-difference imputation of p.
//! let cfg = SimConfig {
//!     spec: ModelSpec::growth(),
//!     theta: Default::default(),
//!     sigma: 1.0,
//!     dt: 0.01,
//!     n_steps: 10_000,
//!     subsample: 1,
//!     x0: (0.0, 1.0),
//!     seed: 7,
//! };
//! let path = exact_growth_path(&cfg).unwrap();
//! let p_hat = nd_impute(&path.q, path.dt).unwrap();
//! let sigma_hat = mle_sigma_quadvar(&p_hat, path.dt).unwrap();
//! // ND imputation biases sigma^2 towards (2/3) sigma^2.
//! assert!((sigma_hat - (2.0f64 / 3.0).sqrt()).abs() < 0.05);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod linalg;
pub(crate) mod math;

pub mod classical;
pub mod density;
pub mod extrapolate;
pub mod gibbs;
pub mod likelihood;
pub mod model;
pub mod rng;
pub mod samplers;
pub mod simulate;
pub mod stats;

pub use error::Error;
pub use gibbs::{posterior_means, run_gibbs, GibbsChain, GibbsConfig, GibbsError, SigmaSampler};
pub use model::{DriftParams, ModelKind, ModelSpec, Path};

/// Log-density up to an additive constant independent of the parameters.
pub type LogDensityValue = f64;
