//! Model family: force bases, rough-drift evaluation, and the one-step noise
//! matrix shared by all estimators.
//!
//! The state is x = (q, p). Every model has the same smooth row dq = p dt;
//! only the rough row differs:
//!
//! ```text
//!   Growth    dp = σ dB
//!   Harmonic  dp = (−D q − γ p) dt + σ dB
//!   Trig      dp = (−Σ_{j=1..c} D_j f_j(q) − γ p) dt + σ dB,
//!             f_j(q) = sin(q) cos^{j−1}(q)
//! ```
//!
//! Parameters are carried as the rough-row coefficients only ([`DriftParams`]);
//! the smooth row is hard-coded. The trig coefficients are indexed 1-based,
//! D_1..D_c. (Sources that label a c=3 set as D_0, D_1, D_2 correspond to
//! (D_1, D_2, D_3) here; the labeling is a convention, not a different basis.)

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::Error;

pub(crate) const SQRT_12: f64 = 3.464_101_615_137_754_6;

/// Which force law the rough row uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Growth,
    Harmonic,
    Trig,
}

/// A validated (kind, number of force terms) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    kind: ModelKind,
    c: usize,
}

impl ModelSpec {
    /// Growth model: no force terms, no damping, no estimable drift.
    pub fn growth() -> Self {
        ModelSpec { kind: ModelKind::Growth, c: 0 }
    }

    /// Harmonic model: single linear force term f_1(q) = q.
    pub fn harmonic() -> Self {
        ModelSpec { kind: ModelKind::Harmonic, c: 1 }
    }

    /// Trig model with `c ≥ 1` force terms f_j(q) = sin(q) cos^{j−1}(q).
    pub fn trig(c: usize) -> Result<Self, Error> {
        if c == 0 {
            return Err(Error::InvalidArgument("trig model needs c >= 1 force terms"));
        }
        Ok(ModelSpec { kind: ModelKind::Trig, c })
    }

    /// Validated constructor from parts.
    pub fn new(kind: ModelKind, c: usize) -> Result<Self, Error> {
        match kind {
            ModelKind::Growth => {
                if c != 0 {
                    return Err(Error::InvalidArgument("growth model has no force terms"));
                }
                Ok(Self::growth())
            }
            ModelKind::Harmonic => {
                if c != 1 {
                    return Err(Error::InvalidArgument("harmonic model has exactly one force term"));
                }
                Ok(Self::harmonic())
            }
            ModelKind::Trig => Self::trig(c),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Number of force terms c.
    pub fn force_terms(&self) -> usize {
        self.c
    }

    /// Number of estimable drift parameters: c force coefficients plus γ,
    /// zero for Growth.
    pub fn param_count(&self) -> usize {
        match self.kind {
            ModelKind::Growth => 0,
            _ => self.c + 1,
        }
    }
}

/// Rough-row drift coefficients (D_1..D_c, γ).
///
/// `gamma ≥ 0` for a physically damped system; estimates drawn from a
/// Gaussian posterior may transiently violate that, so only finiteness is
/// enforced here.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DriftParams {
    pub d: Vec<f64>,
    pub gamma: f64,
}

impl DriftParams {
    pub fn new(d: Vec<f64>, gamma: f64) -> Result<Self, Error> {
        if !gamma.is_finite() || d.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("drift parameters"));
        }
        Ok(DriftParams { d, gamma })
    }

    /// The zero drift with the layout of `spec`.
    pub fn zeros(spec: &ModelSpec) -> Self {
        DriftParams { d: vec![0.0; spec.force_terms()], gamma: 0.0 }
    }

    /// Builds from the flat layout (D_1..D_c, γ) used by the drift sampler.
    pub fn from_flat(phi: &[f64]) -> Result<Self, Error> {
        if phi.is_empty() {
            return Err(Error::InvalidArgument("flat drift vector is empty"));
        }
        let (d, gamma) = phi.split_at(phi.len() - 1);
        DriftParams::new(d.to_vec(), gamma[0])
    }

    pub fn matches(&self, spec: &ModelSpec) -> bool {
        self.d.len() == spec.force_terms()
    }
}

/// A discrete trajectory: smooth component `q` (length N+1), optional rough
/// component `p` of the same length, grid spacing `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub dt: f64,
    pub q: Vec<f64>,
    pub p: Option<Vec<f64>>,
}

impl Path {
    pub fn new(dt: f64, q: Vec<f64>, p: Option<Vec<f64>>) -> Result<Self, Error> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument("dt must be positive and finite"));
        }
        if q.len() < 2 {
            return Err(Error::InvalidArgument("path needs at least two points"));
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("path Q"));
        }
        if let Some(ref p) = p {
            if p.len() != q.len() {
                return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("path P"));
            }
        }
        Ok(Path { dt, q, p })
    }

    /// Number of increments N (one less than the number of points).
    pub fn n_steps(&self) -> usize {
        self.q.len() - 1
    }

    /// The rough component, or an error if it was never observed/imputed.
    pub fn rough(&self) -> Result<&[f64], Error> {
        self.p.as_deref().ok_or(Error::MissingRough)
    }
}

/// The regression features (f_1(q), …, f_c(q), p) used by the drift
/// estimators; the rough drift is −(features)·(D_1..D_c, γ).
///
/// For Growth the returned basis is just (p); the model has no estimable
/// drift, so nothing downstream consumes it.
pub fn force_basis(spec: &ModelSpec, q: f64, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; spec.force_terms() + 1];
    force_basis_into(spec, q, p, &mut out);
    out
}

/// As [`force_basis`], but fills a caller-provided buffer of length c+1.
pub(crate) fn force_basis_into(spec: &ModelSpec, q: f64, p: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), spec.force_terms() + 1);
    match spec.kind {
        ModelKind::Growth => {}
        ModelKind::Harmonic => out[0] = q,
        ModelKind::Trig => {
            // f_j = sin(q) cos^{j-1}(q), built incrementally.
            let s = math::sin(q);
            let c = math::cos(q);
            let mut f = s;
            for slot in out.iter_mut().take(spec.c) {
                *slot = f;
                f *= c;
            }
        }
    }
    out[spec.c] = p;
}

/// Drift of the rough component: −γ p − Σ_j D_j f_j(q) (0 for Growth).
pub fn rough_drift(spec: &ModelSpec, theta: &DriftParams, q: f64, p: f64) -> Result<f64, Error> {
    if !theta.matches(spec) {
        return Err(Error::DimensionMismatch {
            expected: spec.force_terms(),
            got: theta.d.len(),
        });
    }
    Ok(match spec.kind {
        ModelKind::Growth => 0.0,
        ModelKind::Harmonic => -theta.d[0] * q - theta.gamma * p,
        ModelKind::Trig => {
            let s = math::sin(q);
            let c = math::cos(q);
            let mut acc = -theta.gamma * p;
            let mut f = s;
            for &dj in &theta.d {
                acc -= dj * f;
                f *= c;
            }
            acc
        }
    })
}

/// The 2×2 one-step noise matrix σ·[[dt/√12, dt/2], [0, 1]].
///
/// A step of the Itô-Taylor model adds √dt times this matrix applied to two
/// independent standard normals, so the increment covariance is
/// dt · R Rᵀ = σ²[[dt³/3, dt²/2], [dt²/2, dt]] — the exact Growth-model
/// increment covariance. With dt = 0 it degenerates to the Euler noise
/// (rough row only), which is what makes the Euler model unusable for path
/// imputation.
pub fn noise_matrix(dt: f64, sigma: f64) -> [[f64; 2]; 2] {
    [[sigma * dt / SQRT_12, sigma * dt / 2.0], [0.0, sigma]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = core::f64::consts::PI;

    #[test]
    fn test_force_basis_trig_at_zero() {
        let spec = ModelSpec::trig(2).unwrap();
        assert_eq!(force_basis(&spec, 0.0, 3.0), vec![0.0, 0.0, 3.0]);
    }

    #[test]
    fn test_force_basis_trig_at_half_pi() {
        let spec = ModelSpec::trig(2).unwrap();
        let b = force_basis(&spec, PI / 2.0, 0.0);
        assert!((b[0] - 1.0).abs() < 1e-15, "f_1(pi/2) = sin = 1, got {}", b[0]);
        assert!(b[1].abs() < 1e-15, "f_2(pi/2) has a cos factor, got {}", b[1]);
        assert_eq!(b[2], 0.0);
    }

    #[test]
    fn test_force_basis_harmonic() {
        let spec = ModelSpec::harmonic();
        assert_eq!(force_basis(&spec, 1.5, -2.0), vec![1.5, -2.0]);
    }

    #[test]
    fn test_force_basis_growth() {
        let spec = ModelSpec::growth();
        assert_eq!(force_basis(&spec, 9.0, 4.0), vec![4.0]);
    }

    #[test]
    fn test_rough_drift_growth_zero() {
        let spec = ModelSpec::growth();
        let theta = DriftParams::zeros(&spec);
        for (q, p) in [(0.0, 0.0), (3.0, -2.0), (1e6, 1e6)] {
            assert_eq!(rough_drift(&spec, &theta, q, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn test_rough_drift_harmonic() {
        let spec = ModelSpec::harmonic();
        let theta = DriftParams::new(vec![4.0], 0.5).unwrap();
        assert_eq!(rough_drift(&spec, &theta, 1.0, 2.0).unwrap(), -5.0);
    }

    #[test]
    fn test_rough_drift_trig_at_origin() {
        let spec = ModelSpec::trig(3).unwrap();
        let theta = DriftParams::new(vec![1.0, -8.0, 8.0], 0.5).unwrap();
        // All f_j(0) = 0, so only the damping term survives.
        assert_eq!(rough_drift(&spec, &theta, 0.0, 1.0).unwrap(), -0.5);
    }

    #[test]
    fn test_rough_drift_dimension_mismatch() {
        let spec = ModelSpec::trig(3).unwrap();
        let theta = DriftParams::new(vec![1.0], 0.5).unwrap();
        assert_eq!(
            rough_drift(&spec, &theta, 0.0, 1.0),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        );
    }

    #[test]
    fn test_noise_matrix_values() {
        let r = noise_matrix(1.0, 1.0);
        assert!((r[0][0] - 0.288_675_134_594_812_9).abs() < 1e-15);
        assert_eq!(r[0][1], 0.5);
        assert_eq!(r[1][0], 0.0);
        assert_eq!(r[1][1], 1.0);

        let r0 = noise_matrix(0.0, 1.0);
        assert_eq!(r0, [[0.0, 0.0], [0.0, 1.0]]);

        let r2 = noise_matrix(0.01, 2.0);
        assert!((r2[0][0] - 0.005_773_502_691_896_258).abs() < 1e-15);
        assert!((r2[0][1] - 0.01).abs() < 1e-17);
        assert_eq!(r2[1][1], 2.0);
    }

    // dt·RRᵀ must reproduce the exact Growth increment covariance
    // σ²[[dt³/3, dt²/2], [dt²/2, dt]] entrywise (this is what makes the
    // Itô-Taylor model exact for Growth).
    fn assert_covariance_identity(dt: f64, sigma: f64) {
        let r = noise_matrix(dt, sigma);
        let s2 = sigma * sigma;
        let want = [
            [s2 * dt * dt * dt / 3.0, s2 * dt * dt / 2.0],
            [s2 * dt * dt / 2.0, s2 * dt],
        ];
        for i in 0..2 {
            for j in 0..2 {
                let got = dt * (r[i][0] * r[j][0] + r[i][1] * r[j][1]);
                let scale = want[i][j].abs().max(1e-300);
                assert!(
                    (got - want[i][j]).abs() / scale < 1e-14,
                    "covariance ({i},{j}): got {got}, want {}",
                    want[i][j]
                );
            }
        }
    }

    #[test]
    fn test_noise_covariance_identity() {
        for (dt, sigma) in [(0.1, 1.0), (0.002, 0.5), (1.0, 3.0)] {
            assert_covariance_identity(dt, sigma);
        }
    }

    #[test]
    fn test_model_spec_validation() {
        assert!(ModelSpec::trig(0).is_err());
        assert!(ModelSpec::new(ModelKind::Growth, 1).is_err());
        assert!(ModelSpec::new(ModelKind::Harmonic, 2).is_err());
        assert_eq!(ModelSpec::new(ModelKind::Trig, 3).unwrap().param_count(), 4);
        assert_eq!(ModelSpec::growth().param_count(), 0);
    }

    #[test]
    fn test_path_validation() {
        assert!(Path::new(0.0, vec![0.0, 1.0], None).is_err());
        assert!(Path::new(0.1, vec![0.0], None).is_err());
        assert!(Path::new(0.1, vec![0.0, f64::NAN], None).is_err());
        assert!(Path::new(0.1, vec![0.0, 1.0], Some(vec![0.0])).is_err());
        let p = Path::new(0.1, vec![0.0, 1.0], None).unwrap();
        assert_eq!(p.n_steps(), 1);
        assert_eq!(p.rough(), Err(Error::MissingRough));
    }

    proptest! {
        #[test]
        fn prop_covariance_identity(dt in 1e-4f64..10.0, sigma in 0.05f64..20.0) {
            assert_covariance_identity(dt, sigma);
        }

        #[test]
        fn prop_trig_basis_periodic(q in -10.0f64..10.0, p in -5.0f64..5.0) {
            let spec = ModelSpec::trig(4).unwrap();
            let a = force_basis(&spec, q, p);
            let b = force_basis(&spec, q + 2.0 * PI, p);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }

        #[test]
        fn prop_rough_drift_linear_in_params(
            q in -3.0f64..3.0,
            p in -3.0f64..3.0,
            d1 in -5.0f64..5.0,
            d2 in -5.0f64..5.0,
            g1 in 0.0f64..2.0,
            g2 in 0.0f64..2.0,
        ) {
            let spec = ModelSpec::trig(2).unwrap();
            let ta = DriftParams::new(vec![d1, d2], g1).unwrap();
            let tb = DriftParams::new(vec![d2, d1], g2).unwrap();
            let sum = DriftParams::new(vec![d1 + d2, d2 + d1], g1 + g2).unwrap();
            let va = rough_drift(&spec, &ta, q, p).unwrap();
            let vb = rough_drift(&spec, &tb, q, p).unwrap();
            let vs = rough_drift(&spec, &sum, q, p).unwrap();
            prop_assert!((va + vb - vs).abs() < 1e-10, "superposition violated");
        }
    }
}
