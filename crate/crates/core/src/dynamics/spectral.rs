//! Spectral radius of nonnegative matrices by power iteration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Spectral radius of a square nonnegative matrix.
///
/// Iterates on `A + I` from the all-ones vector with max-norm normalisation.
/// For nonnegative `A` the Perron root `ρ(A)` is an eigenvalue and `ρ + 1` is
/// the unique eigenvalue of largest modulus of `A + I`, so the shift removes
/// the oscillation caused by the `-ρ` eigenvalue of bipartite matrices such
/// as the best-response matrix. The estimate must stay within `tol` for `n`
/// consecutive iterations, since from the all-ones start a deficit in one
/// row needs up to `n - 1` products to reach the maximal entry.
pub fn spectral_radius(a: &DMatrix<f64>, tol: f64) -> Result<f64> {
    spectral_radius_with(a, tol, DEFAULT_MAX_ITER)
}

pub fn spectral_radius_with(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<f64> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidConfig(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    if a.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidConfig("matrix has negative or NaN entries".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let shifted = a + DMatrix::<f64>::identity(n, n);
    let mut v = DVector::from_element(n, 1.0);
    let mut estimate = f64::NAN;
    let mut stable = 0;
    for _ in 0..max_iter {
        let w = &shifted * &v;
        let norm = w.amax();
        if norm == 0.0 {
            return Ok(0.0);
        }
        // v is max-normalised, so the max-norm of w tracks ρ(A + I).
        let next = norm - 1.0;
        v = w / norm;
        if (next - estimate).abs() < tol {
            stable += 1;
            if stable >= n {
                return Ok(next.max(0.0));
            }
        } else {
            stable = 0;
        }
        estimate = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: estimate,
        last: v.iter().copied().collect(),
    })
}

/// Smallest and largest row sums, which bracket the spectral radius of an
/// irreducible nonnegative matrix.
pub fn row_sum_bounds(a: &DMatrix<f64>) -> (f64, f64) {
    a.row_iter().map(|r| r.sum()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix() {
        assert_eq!(spectral_radius(&DMatrix::zeros(3, 3), 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn antidiagonal_pair() {
        let g = std::f64::consts::SQRT_2 - 1.0;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, g, g, 0.0]);
        assert!((spectral_radius(&a, 1e-12).unwrap() - g).abs() < 1e-12);
    }

    #[test]
    fn matches_eigenvalues_of_nonsymmetric_matrix() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.3, 0.0, 0.5, 0.0, 0.5, 0.0, 0.3, 0.0]);
        let rho = spectral_radius(&a, 1e-13).unwrap();
        // Similar to a symmetric tridiagonal with off-diagonals sqrt(0.15): ρ = sqrt(0.3).
        assert!((rho - 0.3f64.sqrt()).abs() < 1e-10, "{rho}");
    }

    #[test]
    fn identity_like_rows() {
        let mut a = DMatrix::<f64>::identity(4, 4);
        a[(0, 0)] = 0.0;
        a[(0, 1)] = 0.4;
        assert!((spectral_radius(&a, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(spectral_radius(&DMatrix::zeros(2, 3), 1e-12).is_err());
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(spectral_radius(&a, 1e-12).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0]);
        assert!(matches!(spectral_radius_with(&a, 1e-15, 2), Err(Error::NoConvergence { .. })));
    }
}
