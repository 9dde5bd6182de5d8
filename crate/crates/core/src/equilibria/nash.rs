//! Nash equilibrium of the ordered game via the best-response characterization.
//!
//! At an interior equilibrium each inner station sits at the midpoint of its
//! neighbours, and each outer station solves
//! `2^(2/α) (ε² + (gap/2)²) = ε² + edge²`, where `edge` is its distance to the
//! segment end and `gap` the distance to its neighbour. Solving that
//! quadratic gives the boundary formula used by [`edge_response`].

use super::{max_abs_grad, EquilibriumResult, Method};
use crate::error::{Error, Result};
use crate::scenario::{is_strictly_ordered, max_abs_diff, LocationProfile, ScenarioConfig};
use crate::utility::utilities;

/// Default stopping tolerance, as a fraction of `L`.
pub const DEFAULT_TOL_FRACTION: f64 = 1e-10;
/// Default iteration cap for the fixed-point sweep.
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// `2^(2/α)`.
pub(crate) fn c_alpha(alpha: f64) -> f64 {
    2f64.powf(2.0 / alpha)
}

/// Best distance from the segment end for an outer station whose neighbour
/// is at distance `neighbour` from that same end.
///
/// `(2 sqrt((5c - c² - 4) ε² + c s²) - c s) / (4 - c)` with `c = 2^(2/α)`;
/// for `α = 2` this reduces to `sqrt(2ε² + 2s²) - s`.
pub fn edge_response(neighbour: f64, cfg: &ScenarioConfig) -> Result<f64> {
    let c = c_alpha(cfg.alpha());
    let eps2 = cfg.epsilon() * cfg.epsilon();
    let disc = (5.0 * c - c * c - 4.0) * eps2 + c * neighbour * neighbour;
    if !(disc >= 0.0) {
        return Err(Error::NegativeDiscriminant { value: disc });
    }
    Ok((2.0 * disc.sqrt() - c * neighbour) / (4.0 - c))
}

/// One Gauss-Seidel sweep (players in index order) of the equilibrium system.
pub fn ne_system_step(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<LocationProfile> {
    let mut p = x.positions().to_vec();
    if p.len() != cfg.players() || !is_strictly_ordered(&p, cfg.length()) {
        return Err(Error::OrderViolation(p));
    }
    sweep_in_place(&mut p, cfg)?;
    if !is_strictly_ordered(&p, cfg.length()) {
        return Err(Error::OrderViolation(p));
    }
    LocationProfile::new(p, cfg)
}

fn sweep_in_place(p: &mut [f64], cfg: &ScenarioConfig) -> Result<()> {
    let kk = p.len();
    let length = cfg.length();
    if kk == 1 {
        p[0] = 0.5 * length;
        return Ok(());
    }
    p[0] = edge_response(p[1], cfg)?;
    for k in 1..kk - 1 {
        p[k] = 0.5 * (p[k - 1] + p[k + 1]);
    }
    p[kk - 1] = length - edge_response(length - p[kk - 2], cfg)?;
    Ok(())
}

/// Solves for the Nash equilibrium starting from equal-cell centres.
pub fn solve_ne(cfg: &ScenarioConfig, tol: f64, max_iter: usize) -> Result<EquilibriumResult> {
    solve_ne_from(cfg, &LocationProfile::cell_centers(cfg), tol, max_iter)
}

/// Solves for the Nash equilibrium from an arbitrary ordered start.
///
/// Stops when two successive sweeps differ by less than `tol` in max-norm.
pub fn solve_ne_from(
    cfg: &ScenarioConfig,
    start: &LocationProfile,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tol must be > 0".into()));
    }
    let mut x = start.clone();
    for it in 1..=max_iter {
        let next = ne_system_step(&x, cfg)?;
        let moved = max_abs_diff(next.positions(), x.positions());
        x = next;
        if moved < tol {
            return finish(x, cfg, it, Method::FixedPoint);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: max_abs_grad(&x, cfg)?,
        last: x.into_inner(),
    })
}

fn finish(x: LocationProfile, cfg: &ScenarioConfig, iterations: usize, method: Method) -> Result<EquilibriumResult> {
    Ok(EquilibriumResult {
        residual: max_abs_grad(&x, cfg)?,
        utilities: utilities(&x, cfg)?,
        profile: x,
        iterations,
        method,
    })
}

/// Two-player, free-space equilibrium `x_2 = sqrt(2L² - 4ε²)/2`, `x_1 = L - x_2`.
///
/// Returns `None` unless `K = 2` and `α = 2`.
pub fn two_player_closed_form(cfg: &ScenarioConfig) -> Option<Result<EquilibriumResult>> {
    if cfg.players() != 2 || cfg.alpha() != 2.0 {
        return None;
    }
    let l = cfg.length();
    let e = cfg.epsilon();
    let x2 = 0.5 * (2.0 * l * l - 4.0 * e * e).sqrt();
    Some(LocationProfile::new(vec![l - x2, x2], cfg).and_then(|x| finish(x, cfg, 0, Method::ClosedForm)))
}
