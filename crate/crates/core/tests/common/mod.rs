//! Independent oracles built from closed-form tail integrals.
//!
//! For a station at `x` whose cell edges lie at distances `u_l, u_r >= 0`,
//! `Û = 2 H - T(u_l) - T(u_r)` with `H = ∫_0^∞ h` and `T(u) = ∫_u^∞ h`.
//! The tails are evaluated without cancellation, so finite differences of
//! this form stay accurate where differences of `Û` itself would not.

#![allow(dead_code)]

/// `∫_u^∞ (t² + ε²)^(-α/2) dt` for `u >= 0`, `α ∈ {2, 3}`.
pub fn tail(u: f64, eps: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        eps.atan2(u) / eps
    } else if alpha == 3.0 {
        let r = u.hypot(eps);
        1.0 / (r * (r + u))
    } else {
        panic!("no closed-form tail for alpha = {alpha}");
    }
}

pub fn half_mass(eps: f64, alpha: f64) -> f64 {
    tail(0.0, eps, alpha)
}

/// Antiderivative of `(u² + ε²)^(-α/2)` for `α ∈ {2, 3, 4}`.
pub fn antiderivative(u: f64, eps: f64, alpha: f64) -> f64 {
    let r2 = u * u + eps * eps;
    match alpha as u32 {
        2 => (u / eps).atan() / eps,
        3 => u / (eps * eps * r2.sqrt()),
        4 => (eps * u / r2 + (u / eps).atan()) / (2.0 * eps.powi(3)),
        _ => panic!("no antiderivative for alpha = {alpha}"),
    }
}

/// Cell edges of station `k` for sorted positions.
pub fn edges(k: usize, x: &[f64], length: f64) -> (f64, f64) {
    let lo = if k == 0 { 0.0 } else { 0.5 * (x[k - 1] + x[k]) };
    let hi = if k + 1 == x.len() { length } else { 0.5 * (x[k] + x[k + 1]) };
    (lo, hi)
}

/// `Û_k - 2H`, i.e. minus the two tails.
pub fn reduced_utility(k: usize, x: &[f64], length: f64, eps: f64, alpha: f64) -> f64 {
    let (lo, hi) = edges(k, x, length);
    -tail(x[k] - lo, eps, alpha) - tail(hi - x[k], eps, alpha)
}

pub fn utility(k: usize, x: &[f64], length: f64, eps: f64, alpha: f64) -> f64 {
    2.0 * half_mass(eps, alpha) + reduced_utility(k, x, length, eps, alpha)
}

fn shifted(x: &[f64], k: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += d;
    y
}

/// Richardson-extrapolated central first difference with base step `h`.
pub fn fd_gradient(k: usize, x: &[f64], length: f64, eps: f64, alpha: f64, h: f64) -> f64 {
    let f = |d: f64| reduced_utility(k, &shifted(x, k, d), length, eps, alpha);
    let d1 = (f(h) - f(-h)) / (2.0 * h);
    let d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
    (4.0 * d2 - d1) / 3.0
}

/// Richardson-extrapolated central second difference with base step `h`.
pub fn fd_second(k: usize, x: &[f64], length: f64, eps: f64, alpha: f64, h: f64) -> f64 {
    let f = |d: f64| reduced_utility(k, &shifted(x, k, d), length, eps, alpha);
    let f0 = f(0.0);
    let s1 = (f(h) - 2.0 * f0 + f(-h)) / (h * h);
    let s2 = (f(0.5 * h) - 2.0 * f0 + f(-0.5 * h)) / (0.25 * h * h);
    (4.0 * s2 - s1) / 3.0
}

/// Brute-force maximiser of `Û_k` over a uniform grid inside the neighbours'
/// interval, refined by successive zooms around the best grid point.
pub fn brute_force_response(k: usize, x: &[f64], length: f64, eps: f64, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (
        if k == 0 { 0.0 } else { x[k - 1] },
        if k + 1 == x.len() { length } else { x[k + 1] },
    );
    let n = 2000;
    let mut best = 0.5 * (lo + hi);
    for _ in 0..6 {
        let step = (hi - lo) / n as f64;
        let mut best_val = f64::NEG_INFINITY;
        for i in 1..n {
            let y = lo + step * i as f64;
            let v = reduced_utility(k, &shifted(x, k, y - x[k]), length, eps, alpha);
            if v > best_val {
                best_val = v;
                best = y;
            }
        }
        lo = (best - 2.0 * step).max(lo);
        hi = (best + 2.0 * step).min(hi);
    }
    best
}

/// Composite midpoint rule on `n` panels, Richardson-refined against `2n`.
pub fn midpoint_richardson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let mid = |m: usize| {
        let w = (b - a) / m as f64;
        (0..m).map(|i| f(a + w * (i as f64 + 0.5))).sum::<f64>() * w
    };
    let (m1, m2) = (mid(n), mid(2 * n));
    (4.0 * m2 - m1) / 3.0
}
