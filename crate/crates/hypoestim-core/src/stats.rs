//! Sample statistics used by the test oracles and the experiment drivers.

use alloc::vec::Vec;

use crate::math;

/// Arithmetic mean; panics on empty input.
pub fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "mean of empty slice");
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n−1 divisor); panics unless len ≥ 2.
pub fn sample_var(xs: &[f64]) -> f64 {
    assert!(xs.len() >= 2, "variance needs at least two values");
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Square root of [`sample_var`].
pub fn sample_sd(xs: &[f64]) -> f64 {
    math::sqrt(sample_var(xs))
}

/// Two-sample Kolmogorov-Smirnov statistic sup|F_a − F_b|, tie-aware.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs non-empty samples");
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < na && a[i] == x {
            i += 1;
        }
        while j < nb && b[j] == x {
            j += 1;
        }
        let gap = math::abs(i as f64 / na as f64 - j as f64 / nb as f64);
        if gap > d {
            d = gap;
        }
    }
    d
}

/// Large-sample two-sided KS critical value at the 1% level:
/// c(0.01)·√((n+m)/(n·m)) with c(0.01) = 1.62762.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    assert!(n > 0 && m > 0);
    let (n, m) = (n as f64, m as f64);
    1.62762 * math::sqrt((n + m) / (n * m))
}
