//! Minimal dense and banded Cholesky machinery.
//!
//! Two factorizations cover every linear solve in the crate: a dense LLᵀ for
//! the (c+1)-dimensional drift posterior, and an UᵀU factorization of a
//! symmetric positive-definite tridiagonal matrix (U upper bidiagonal) for
//! the O(N) path sampler.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::Error;

/// Dense lower-triangular Cholesky factor of a small SPD matrix.
#[derive(Clone, Debug)]
pub(crate) struct CholeskyLower {
    n: usize,
    /// Row-major n×n storage; entries above the diagonal are zero.
    l: Vec<f64>,
}

impl CholeskyLower {
    /// Factors the row-major symmetric matrix `a` (n×n) as L Lᵀ.
    pub fn factor(a: &[f64], n: usize) -> Result<Self, Error> {
        assert_eq!(a.len(), n * n);
        let scale = a
            .iter()
            .step_by(n + 1)
            .fold(0.0f64, |m, &x| m.max(math::abs(x)))
            .max(1e-300);
        let tol = 1e-13 * scale;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > tol) {
                        return Err(Error::IllConditioned("dense Cholesky pivot"));
                    }
                    l[i * n + i] = math::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(CholeskyLower { n, l })
    }

    /// Solves L Lᵀ x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let y = self.solve_lower(b);
        self.solve_upper(&y)
    }

    /// Solves L y = b (forward substitution).
    fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    /// Solves Lᵀ x = y (back substitution); maps iid normals to posterior
    /// fluctuations since Cov(L⁻ᵀ ξ) = (L Lᵀ)⁻¹.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }
}

/// UᵀU factorization of an SPD tridiagonal matrix, U upper bidiagonal.
#[derive(Clone, Debug)]
pub(crate) struct TridiagCholesky {
    /// Diagonal of U.
    pub d: Vec<f64>,
    /// Superdiagonal of U (length n−1).
    pub e: Vec<f64>,
}

impl TridiagCholesky {
    /// Factors the tridiagonal matrix with diagonal `diag` and symmetric
    /// off-diagonal `off` (length n−1).
    pub fn factor(diag: &[f64], off: &[f64]) -> Result<Self, Error> {
        let n = diag.len();
        assert_eq!(off.len(), n.saturating_sub(1));
        let scale = diag.iter().fold(0.0f64, |m, &x| m.max(math::abs(x))).max(1e-300);
        let tol = 1e-13 * scale;
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n.saturating_sub(1)];
        let mut prev_e = 0.0;
        for i in 0..n {
            let pivot = diag[i] - prev_e * prev_e;
            if !(pivot > tol) {
                return Err(Error::IllConditioned("tridiagonal Cholesky pivot"));
            }
            d[i] = math::sqrt(pivot);
            if i + 1 < n {
                e[i] = off[i] / d[i];
                prev_e = e[i];
            }
        }
        Ok(TridiagCholesky { d, e })
    }

    /// Solves UᵀU x = b in O(n).
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        // Forward: Uᵀ y = b.
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            if i > 0 {
                s -= self.e[i - 1] * y[i - 1];
            }
            y[i] = s / self.d[i];
        }
        self.solve_u(&mut y);
        y
    }

    /// Solves U x = y in place (back substitution). With y iid standard
    /// normal this yields a draw with covariance (UᵀU)⁻¹.
    pub fn solve_u(&self, y: &mut [f64]) {
        let n = self.d.len();
        if n == 0 {
            return;
        }
        y[n - 1] /= self.d[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = (y[i] - self.e[i] * y[i + 1]) / self.d[i];
        }
    }
}

/// Solves a 2×2 system a·x = b by Cramer's rule with a pivot guard.
pub(crate) fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Result<[f64; 2], Error> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, &x| m.max(math::abs(x)))
        .max(1e-300);
    if math::abs(det) <= 1e-13 * scale * scale {
        return Err(Error::IllConditioned("2x2 system"));
    }
    Ok([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}
