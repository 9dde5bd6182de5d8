//! Adaptive Simpson quadrature.
//!
//! The integrands in this crate are smooth and positive but sharply peaked
//! (width of order epsilon) at the base-station position, so callers split
//! the interval at the peak before integrating.

/// Absolute tolerance used for interference and capacity integrals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum bisection depth.
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Returns 0 for empty or reversed intervals of zero width; a reversed
/// interval yields the negated integral.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    if b < a {
        return -adaptive_simpson(f, b, a, tol, max_depth);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Tolerances below the rounding noise of the estimate cannot be met;
    // without this floor the recursion would run to max depth on every branch.
    let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 40);
        assert!((v - 0.0).abs() < 1e-12);
        let v = adaptive_simpson(|x| x * x, -1.0, 2.0, 1e-12, 40);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_reversed_intervals() {
        assert_eq!(adaptive_simpson(|x| x.exp(), 1.5, 1.5, 1e-10, 40), 0.0);
        let fwd = adaptive_simpson(|x| x.sin(), 0.0, 1.0, 1e-12, 40);
        let rev = adaptive_simpson(|x| x.sin(), 1.0, 0.0, 1e-12, 40);
        assert_eq!(fwd, -rev);
        assert!((fwd - (1.0 - 1f64.cos())).abs() < 1e-12);
    }

    #[test]
    fn peaked_lorentzian_matches_arctan() {
        let eps: f64 = 0.1;
        let v = adaptive_simpson(|z| 1.0 / (z * z + eps * eps), 0.0, 50.0, 1e-10, 40);
        let exact = (50.0 / eps).atan() / eps;
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }
}
