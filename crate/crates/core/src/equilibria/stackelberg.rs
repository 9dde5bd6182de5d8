//! Two-player leader/follower game: the leader picks `x_1` anticipating the
//! follower's best response `x_2(x_1)`.

use super::{golden_section_max, EquilibriumResult, Method};
use crate::equilibria::nash::{c_alpha, edge_response};
use crate::error::{Error, Result};
use crate::scenario::{LocationProfile, ScenarioConfig};
use crate::utility::{cell_interference, grad_unchecked, leader_cross_grad, utilities};

/// Number of sub-brackets searched for the leader position.
const LEADER_STARTS: usize = 5;

fn require_two_players(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.players() == 2 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "leader/follower game needs K = 2, got K = {}",
            cfg.players()
        )))
    }
}

/// Follower best response `x_2(x_1)`.
pub fn follower_br(x1: f64, cfg: &ScenarioConfig) -> Result<f64> {
    require_two_players(cfg)?;
    let l = cfg.length();
    if !(x1 > 0.0 && x1 < l) {
        return Err(Error::OrderViolation(vec![x1]));
    }
    Ok(l - edge_response(l - x1, cfg)?)
}

/// Slope `dx_2/dx_1` of the follower response.
fn follower_slope(x1: f64, cfg: &ScenarioConfig) -> f64 {
    let c = c_alpha(cfg.alpha());
    let s = cfg.length() - x1;
    let eps2 = cfg.epsilon() * cfg.epsilon();
    let root = ((5.0 * c - c * c - 4.0) * eps2 + c * s * s).sqrt();
    (-c + 2.0 * c * s / root) / (4.0 - c)
}

/// Leader utility `Û_1(x_1, x_2(x_1))`.
pub fn leader_utility(x1: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let x2 = follower_br(x1, cfg)?;
    Ok(cell_interference(0.0, 0.5 * (x1 + x2), x1, cfg))
}

/// Total derivative of the leader utility along the follower response.
pub fn leader_total_derivative(x1: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let x2 = follower_br(x1, cfg)?;
    let x = [x1, x2];
    Ok(grad_unchecked(0, &x, cfg) + leader_cross_grad(&x, cfg) * follower_slope(x1, cfg))
}

/// Free-space limit `ε → 0` of the leader/follower positions:
/// `x_1 = (1 - √2 + sqrt(2 - √2)) L`, `x_2 = (√2 - 1)(1 + sqrt(2 - √2)) L`.
pub fn stackelberg_limit(length: f64) -> (f64, f64) {
    let r2 = std::f64::consts::SQRT_2;
    let t = (2.0 - r2).sqrt();
    ((1.0 - r2 + t) * length, (r2 - 1.0) * (1.0 + t) * length)
}

/// Solves the leader problem by golden-section search over `(0, L)`.
///
/// The interval is split into [`LEADER_STARTS`] brackets searched
/// independently; the best bracket is then polished by bisection on the total
/// derivative when it changes sign there.
pub fn solve_stackelberg(cfg: &ScenarioConfig, tol: f64) -> Result<EquilibriumResult> {
    require_two_players(cfg)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tol must be > 0".into()));
    }
    let l = cfg.length();
    let edge = 1e-9 * l;
    let width = l / LEADER_STARTS as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut iterations = 0;
    for i in 0..LEADER_STARTS {
        let lo = (i as f64 * width).max(edge);
        let hi = ((i + 1) as f64 * width).min(l - edge);
        let (x, _, it) = golden_section_max(|x| leader_utility(x, cfg).unwrap_or(f64::NEG_INFINITY), lo, hi, tol)?;
        iterations += it;
        let v = leader_utility(x, cfg)?;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((x, v));
        }
    }
    let (mut x1, _) = best.expect("at least one bracket");
    x1 = polish_root(x1, cfg, tol, &mut iterations)?;
    let x2 = follower_br(x1, cfg)?;
    let profile = LocationProfile::new(vec![x1, x2], cfg)?;
    let residual = leader_total_derivative(x1, cfg)?
        .abs()
        .max(grad_unchecked(1, profile.positions(), cfg).abs());
    Ok(EquilibriumResult {
        utilities: utilities(&profile, cfg)?,
        profile,
        residual,
        iterations,
        method: Method::GridRefine,
    })
}

fn polish_root(x1: f64, cfg: &ScenarioConfig, tol: f64, iterations: &mut usize) -> Result<f64> {
    let l = cfg.length();
    let h = (1e-4 * l).max(10.0 * tol);
    let (mut lo, mut hi) = ((x1 - h).max(1e-9 * l), (x1 + h).min(l * (1.0 - 1e-9)));
    let (dlo, dhi) = (leader_total_derivative(lo, cfg)?, leader_total_derivative(hi, cfg)?);
    if !(dlo > 0.0 && dhi < 0.0) {
        return Ok(x1);
    }
    while hi - lo > tol.min(1e-12 * l) && *iterations < 10_000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if leader_total_derivative(mid, cfg)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        *iterations += 1;
    }
    let candidate = 0.5 * (lo + hi);
    // Keep the golden-section point if bisection did not improve the objective.
    if leader_utility(candidate, cfg)? >= leader_utility(x1, cfg)? {
        Ok(candidate)
    } else {
        Ok(x1)
    }
}
