//! External observation series: validation, time rescaling, subsampling,
//! and repair of periodic wrap-arounds.

use std::f64::consts::PI;
use std::path::Path;

use crate::csv::read_csv;
use crate::Failure;

/// Relative tolerance on spacing jitter in the time column.
pub const SPACING_REL_TOL: f64 = 1e-6;

/// An equispaced scalar series ready for fitting.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSeries {
    /// Spacing after rescaling and subsampling.
    pub dt: f64,
    /// Rescaled time of the first sample.
    pub t0: f64,
    /// Smooth-component samples (continuous; see [`unwrap_jumps`]).
    pub q: Vec<f64>,
}

/// Reads a `t,value` CSV (extra columns ignored), validates the time column,
/// multiplies times by `dt_rescale`, removes periodic wrap-arounds, and keeps
/// every `subsample_k`-th sample starting from the first.
///
/// The time column must be strictly increasing and equispaced to
/// [`SPACING_REL_TOL`] relative jitter. With `dt_rescale = 1` and
/// `subsample_k = 1` a jump-free series passes through bit-exact.
pub fn ingest_series(
    file: &Path,
    dt_rescale: f64,
    subsample_k: usize,
) -> Result<ObservationSeries, Failure> {
    if !(dt_rescale > 0.0) || !dt_rescale.is_finite() {
        return Err(Failure::Usage("time rescale factor must be positive and finite".into()));
    }
    if subsample_k == 0 {
        return Err(Failure::Usage("subsample stride must be at least 1".into()));
    }
    let table = read_csv(file)?;
    if table.columns.len() < 2 {
        return Err(Failure::Format(format!(
            "{}: need at least two columns (t, value), found {}",
            file.display(),
            table.columns.len()
        )));
    }
    let n = table.rows.len();
    if n < 2 {
        return Err(Failure::Format(format!("{}: need at least two samples", file.display())));
    }
    let t: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    for (i, w) in t.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Failure::Format(format!(
                "{}: time column not strictly increasing between rows {} and {}",
                file.display(),
                i + 1,
                i + 2
            )));
        }
    }
    let dt_ref = (t[n - 1] - t[0]) / (n - 1) as f64;
    for (i, w) in t.windows(2).enumerate() {
        let dt_i = w[1] - w[0];
        if (dt_i - dt_ref).abs() > SPACING_REL_TOL * dt_ref {
            return Err(Failure::Format(format!(
                "{}: irregular spacing at row {}: {:e} vs mean {:e}",
                file.display(),
                i + 2,
                dt_i,
                dt_ref
            )));
        }
    }
    let mut q: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
    unwrap_jumps(&mut q);
    let q = q.into_iter().step_by(subsample_k).collect();
    Ok(ObservationSeries {
        dt: dt_ref * dt_rescale * subsample_k as f64,
        t0: t[0] * dt_rescale,
        q,
    })
}

/// Removes ±2π wrap-arounds in place: any consecutive jump larger than π in
/// magnitude is read as a wrap of a periodic coordinate, and the tail is
/// shifted by the compensating multiple of 2π. Series whose true increments
/// stay below π per sample come back untouched (shift stays exactly 0.0),
/// which is every adequately resolved diffusion path.
pub fn unwrap_jumps(q: &mut [f64]) {
    let mut shift = 0.0;
    for i in 1..q.len() {
        let d = q[i] + shift - q[i - 1];
        if d > PI {
            shift -= 2.0 * PI;
        } else if d < -PI {
            shift += 2.0 * PI;
        }
        q[i] += shift;
    }
}

/// Maps a value into (−π, π] for density reporting on the periodic domain.
pub fn wrap_angle(x: f64) -> f64 {
    let mut r = x % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}
