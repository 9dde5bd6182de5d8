//! Channel attenuation, per-cell interference and the station utilities.
//!
//! The game utility of station `k` is its interference integral
//! `Î_k = ∫_{cell k} (|z - x_k|² + ε²)^(-α/2) dz`; the low-SINR surrogate
//! `Î_k / (σ² + Î_k)` and the capacity sum are reported alongside it.

use crate::error::Result;
use crate::quadrature::{adaptive_simpson, DEFAULT_MAX_DEPTH, DEFAULT_TOL};
use crate::scenario::{partition, CellPartition, LocationProfile, ScenarioConfig};

/// Uplink attenuation `(|z - x_k|² + ε²)^(-α/2)`.
pub fn attenuation(z: f64, xk: f64, cfg: &ScenarioConfig) -> f64 {
    decay(z - xk, cfg.epsilon(), cfg.alpha())
}

#[inline]
pub(crate) fn decay(d: f64, epsilon: f64, alpha: f64) -> f64 {
    let r2 = d * d + epsilon * epsilon;
    if alpha == 2.0 {
        1.0 / r2
    } else {
        r2.powf(-0.5 * alpha)
    }
}

/// `d/dd` of [`decay`]: `-α d (d² + ε²)^(-α/2 - 1)`.
#[inline]
fn decay_slope(d: f64, epsilon: f64, alpha: f64) -> f64 {
    let r2 = d * d + epsilon * epsilon;
    -alpha * d * r2.powf(-0.5 * alpha - 1.0)
}

/// Integral of the attenuation seen from a station at `xk` over `[lo, hi]`.
///
/// Closed form for `α = 2`, adaptive Simpson split at the peak otherwise.
pub fn cell_interference(lo: f64, hi: f64, xk: f64, cfg: &ScenarioConfig) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let eps = cfg.epsilon();
    let alpha = cfg.alpha();
    if alpha == 2.0 {
        return (((hi - xk) / eps).atan() - ((lo - xk) / eps).atan()) / eps;
    }
    let f = |u: f64| decay(u, eps, alpha);
    // Integrate in the shifted variable u = z - xk so the peak sits at 0.
    let (a, b) = (lo - xk, hi - xk);
    if a < 0.0 && b > 0.0 {
        adaptive_simpson(f, a, 0.0, 0.5 * DEFAULT_TOL, DEFAULT_MAX_DEPTH)
            + adaptive_simpson(f, 0.0, b, 0.5 * DEFAULT_TOL, DEFAULT_MAX_DEPTH)
    } else {
        adaptive_simpson(f, a, b, DEFAULT_TOL, DEFAULT_MAX_DEPTH)
    }
}

/// Interference integrals of every station for positions sorted by
/// non-decreasing value. Coincident positions are allowed: the station with
/// the lower index then receives the left half-cell.
pub fn interference_sorted(x: &[f64], cfg: &ScenarioConfig) -> Vec<f64> {
    let cells = CellPartition::from_sorted(x, cfg.length());
    cells
        .cells()
        .zip(x)
        .map(|((lo, hi), &xk)| cell_interference(lo, hi, xk, cfg))
        .collect()
}

/// `Î_k` for player `k` (zero-based).
pub fn interference(k: usize, x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    cfg.check_player(k)?;
    let cells = partition(x, cfg)?;
    let (lo, hi) = cells.cell(k);
    Ok(cell_interference(lo, hi, x.positions()[k], cfg))
}

/// `Û_k = Î_k` for all players.
pub fn game_utilities(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<Vec<f64>> {
    partition(x, cfg)?;
    Ok(interference_sorted(x.positions(), cfg))
}

/// Sum of game utilities `Σ_k Û_k`.
pub fn social_utility(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    Ok(game_utilities(x, cfg)?.iter().sum())
}

/// Per-player utilities of one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityReport {
    /// Interference integral `Î_k`.
    pub interference: Vec<f64>,
    /// Game utility `Û_k` (equal to `Î_k`).
    pub u_hat: Vec<f64>,
    /// Low-SINR surrogate `Î_k / (σ² + Î_k)`, in `[0, 1)`.
    pub u_approx: Vec<f64>,
    /// Capacity sum over the cell in nats.
    pub u_exact: Vec<f64>,
}

impl UtilityReport {
    pub fn sum_u_hat(&self) -> f64 {
        self.u_hat.iter().sum()
    }
}

/// Full utility report with uniform terminal density.
pub fn utilities(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<UtilityReport> {
    utilities_with_density(x, cfg, |_| 1.0)
}

/// Utility report where the capacity sum is weighted by a terminal density.
///
/// The interference term inside the logarithm is computed once per cell and
/// includes every terminal of the cell.
pub fn utilities_with_density<D>(x: &LocationProfile, cfg: &ScenarioConfig, density: D) -> Result<UtilityReport>
where
    D: Fn(f64) -> f64,
{
    partition(x, cfg)?;
    let interference = interference_sorted(x.positions(), cfg);
    let sigma2 = cfg.sigma2();
    let u_approx = interference.iter().map(|i| i / (sigma2 + i)).collect();
    let u_exact = capacity_from(x.positions(), &interference, cfg, &density);
    Ok(UtilityReport {
        u_hat: interference.clone(),
        interference,
        u_approx,
        u_exact,
    })
}

/// Capacity-sum utilities for non-decreasing positions (uniform density).
pub fn capacity_sorted(x: &[f64], cfg: &ScenarioConfig) -> Vec<f64> {
    let interference = interference_sorted(x, cfg);
    capacity_from(x, &interference, cfg, &|_| 1.0)
}

fn capacity_from(x: &[f64], interference: &[f64], cfg: &ScenarioConfig, density: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let cells = CellPartition::from_sorted(x, cfg.length());
    cells
        .cells()
        .zip(x)
        .zip(interference)
        .map(|(((lo, hi), &xk), &ik)| {
            let denom = cfg.sigma2() + ik;
            let f = |z: f64| density(z) * (attenuation(z, xk, cfg) / denom).ln_1p();
            let peak = xk.clamp(lo, hi);
            adaptive_simpson(f, lo, peak, 0.5 * DEFAULT_TOL, DEFAULT_MAX_DEPTH)
                + adaptive_simpson(f, peak, hi, 0.5 * DEFAULT_TOL, DEFAULT_MAX_DEPTH)
        })
        .collect()
}

/// Distances from station `k` to its left and right cell edges: half the gap
/// to a neighbour, or the distance to the segment end for an outer edge.
fn edge_gaps(k: usize, x: &[f64], length: f64) -> (Edge, Edge) {
    let kk = x.len();
    let left = if k == 0 { Edge::Fixed(x[0]) } else { Edge::Shared(0.5 * (x[k] - x[k - 1])) };
    let right = if k + 1 == kk { Edge::Fixed(length - x[k]) } else { Edge::Shared(0.5 * (x[k + 1] - x[k])) };
    (left, right)
}

#[derive(Clone, Copy)]
enum Edge {
    /// Segment end; the edge does not move with the station.
    Fixed(f64),
    /// Midpoint to a neighbour; moves at half the station's speed.
    Shared(f64),
}

fn check_profile(k: usize, x: &LocationProfile, cfg: &ScenarioConfig) -> Result<()> {
    cfg.check_player(k)?;
    partition(x, cfg).map(|_| ())
}

/// Own-position derivative `∂Û_k/∂x_k`.
pub fn grad_utility(k: usize, x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    check_profile(k, x, cfg)?;
    Ok(grad_unchecked(k, x.positions(), cfg))
}

pub(crate) fn grad_unchecked(k: usize, x: &[f64], cfg: &ScenarioConfig) -> f64 {
    let (eps, alpha) = (cfg.epsilon(), cfg.alpha());
    let (left, right) = edge_gaps(k, x, cfg.length());
    let l = match left {
        Edge::Fixed(d) => decay(d, eps, alpha),
        Edge::Shared(d) => 0.5 * decay(d, eps, alpha),
    };
    let r = match right {
        Edge::Fixed(d) => decay(d, eps, alpha),
        Edge::Shared(d) => 0.5 * decay(d, eps, alpha),
    };
    l - r
}

/// Own-position second derivative `∂²Û_k/∂x_k²`; negative on ordered profiles.
pub fn hessian_diag(k: usize, x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    check_profile(k, x, cfg)?;
    let (eps, alpha) = (cfg.epsilon(), cfg.alpha());
    let (left, right) = edge_gaps(k, x.positions(), cfg.length());
    let l = match left {
        Edge::Fixed(d) => decay_slope(d, eps, alpha),
        Edge::Shared(d) => 0.25 * decay_slope(d, eps, alpha),
    };
    let r = match right {
        Edge::Fixed(d) => decay_slope(d, eps, alpha),
        Edge::Shared(d) => 0.25 * decay_slope(d, eps, alpha),
    };
    Ok(l + r)
}

/// Gradient of the social utility `Σ_j Û_j` with respect to every position.
pub fn social_gradient(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<Vec<f64>> {
    partition(x, cfg)?;
    let p = x.positions();
    let (eps, alpha) = (cfg.epsilon(), cfg.alpha());
    let kk = p.len();
    Ok((0..kk)
        .map(|k| {
            let mut g = grad_unchecked(k, p, cfg);
            // Moving x_k also moves the shared boundary of each neighbour's cell.
            if k > 0 {
                g += 0.5 * decay(0.5 * (p[k] - p[k - 1]), eps, alpha);
            }
            if k + 1 < kk {
                g -= 0.5 * decay(0.5 * (p[k + 1] - p[k]), eps, alpha);
            }
            g
        })
        .collect())
}

/// Cross derivative `∂Û_1/∂x_2` for the two-player game: the leader's cell
/// grows as the follower moves right.
pub(crate) fn leader_cross_grad(x: &[f64], cfg: &ScenarioConfig) -> f64 {
    0.5 * decay(0.5 * (x[1] - x[0]), cfg.epsilon(), cfg.alpha())
}
