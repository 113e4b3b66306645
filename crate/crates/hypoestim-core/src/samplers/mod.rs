//! The three conditional samplers of the Gibbs loop, plus reference
//! estimators used for the bias demonstrations:
//!
//! * [`drift`]: the Gaussian drift posterior under the Euler likelihood,
//! * [`sigma`]: σ via the ζ = σ⁴ Langevin SDE, with a conjugate direct
//!   sampler kept as a permanent oracle,
//! * [`path`]: the missing rough path from the tridiagonal Gaussian
//!   conditional of the Itô-Taylor likelihood.

pub mod drift;
pub mod path;
pub mod sigma;

pub use drift::{
    drift_mle_ito, drift_posterior, sample_drift, sample_drift_with_noise, DriftPosterior,
};
pub use path::{path_precision, sample_path_direct, sample_path_with_noise, PrecisionSystem};
pub use sigma::{
    langevin_step_plan, mle_sigma_quadvar, sample_sigma_direct, sample_sigma_langevin,
    sample_sigma_langevin_auto,
};
