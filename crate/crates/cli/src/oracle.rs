//! Brute-force and closed-form reference values.
//!
//! Utilities here are written as `Û = 2H - T(u_l) - T(u_r)`, where `u_l`,
//! `u_r` are the distances from the station to its cell edges,
//! `H = ∫_0^∞ h` and `T(u) = ∫_u^∞ h`. The tails have cancellation-free
//! closed forms for `α ∈ {2, 3}`, which keeps finite differences accurate.

use locgame_core::utility::cell_interference;
use locgame_core::{attenuation, ScenarioConfig};
use rayon::prelude::*;

/// `∫_u^∞ (t² + ε²)^(-α/2) dt`; `None` unless `α ∈ {2, 3}`.
pub fn tail(u: f64, eps: f64, alpha: f64) -> Option<f64> {
    if alpha == 2.0 {
        Some(eps.atan2(u) / eps)
    } else if alpha == 3.0 {
        let r = u.hypot(eps);
        Some(1.0 / (r * (r + u)))
    } else {
        None
    }
}

fn cell_edges(k: usize, x: &[f64], length: f64) -> (f64, f64) {
    let lo = if k == 0 { 0.0 } else { 0.5 * (x[k - 1] + x[k]) };
    let hi = if k + 1 == x.len() { length } else { 0.5 * (x[k] + x[k + 1]) };
    (lo, hi)
}

/// `Û_k - 2H`.
fn reduced_utility(k: usize, x: &[f64], cfg: &ScenarioConfig) -> f64 {
    let (lo, hi) = cell_edges(k, x, cfg.length());
    let t = |u| tail(u, cfg.epsilon(), cfg.alpha()).expect("alpha checked by the caller");
    -t(x[k] - lo) - t(hi - x[k])
}

/// Game utility of station `k` from the tail form.
pub fn utility(k: usize, x: &[f64], cfg: &ScenarioConfig) -> f64 {
    let half = tail(0.0, cfg.epsilon(), cfg.alpha()).expect("alpha checked by the caller");
    2.0 * half + reduced_utility(k, x, cfg)
}

/// Central difference of `Û_k` in `x_k` with step `h`, Richardson-refined with `h/2`.
pub fn fd_gradient(k: usize, x: &[f64], cfg: &ScenarioConfig, h: f64) -> f64 {
    let f = |d: f64| {
        let mut y = x.to_vec();
        y[k] += d;
        reduced_utility(k, &y, cfg)
    };
    let coarse = (f(h) - f(-h)) / (2.0 * h);
    let fine = (f(0.5 * h) - f(-0.5 * h)) / h;
    (4.0 * fine - coarse) / 3.0
}

/// Best utility sum over the ordered pairs of a uniform grid of step `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMax {
    pub step: f64,
    pub argmax: [f64; 2],
    pub value: f64,
}

/// Exhaustive two-station search over `{step, 2 step, ...} ⊂ (0, L)`.
pub fn social_max_grid(cfg: &ScenarioConfig, step: f64) -> GridMax {
    let n = (cfg.length() / step).round() as usize;
    let best = (1..n)
        .into_par_iter()
        .map(|i| {
            let x1 = step * i as f64;
            let mut best = (f64::NEG_INFINITY, [x1, x1]);
            for j in i + 1..n {
                let x = [x1, step * j as f64];
                let v = utility(0, &x, cfg) + utility(1, &x, cfg);
                if v > best.0 {
                    best = (v, x);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, [0.0, 0.0]),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    GridMax {
        step,
        argmax: best.1,
        value: best.0,
    }
}

/// Composite midpoint rule on `panels` panels, Richardson-refined against `2 panels`.
pub fn riemann<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let mid = |m: usize| {
        let w = (b - a) / m as f64;
        (0..m).map(|i| f(a + w * (i as f64 + 0.5))).sum::<f64>() * w
    };
    (4.0 * mid(2 * panels) - mid(panels)) / 3.0
}

/// Cell integral by the library against a Riemann sum split at the peak.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCheck {
    pub lo: f64,
    pub hi: f64,
    pub xk: f64,
    pub library: f64,
    pub riemann: f64,
    pub panels: usize,
}

impl QuadratureCheck {
    pub fn rel_err(&self) -> f64 {
        (self.library - self.riemann).abs() / self.riemann.abs()
    }
}

pub fn quadrature_check(lo: f64, hi: f64, xk: f64, cfg: &ScenarioConfig, panels: usize) -> QuadratureCheck {
    let f = |z: f64| attenuation(z, xk, cfg);
    let mut reference = 0.0;
    if xk > lo {
        reference += riemann(f, lo, xk, panels);
    }
    if hi > xk {
        reference += riemann(f, xk, hi, panels);
    }
    QuadratureCheck {
        lo,
        hi,
        xk,
        library: cell_interference(lo, hi, xk, cfg),
        riemann: reference,
        panels,
    }
}
