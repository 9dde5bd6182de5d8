//! Best-response dynamics on the exact game.

use rayon::prelude::*;

use crate::equilibria::edge_response;
use crate::error::{Error, Result};
use crate::scenario::{is_strictly_ordered, max_abs_diff, LocationProfile, ScenarioConfig};
use crate::utility::interference_sorted;

/// Default stopping threshold, as a fraction of `L`.
pub const DEFAULT_BETA_FRACTION: f64 = 1e-8;
pub const DEFAULT_MAX_STEPS: usize = 100_000;
/// Gap kept between a moving station and its neighbours, as a fraction of `L`.
const ORDER_PAD: f64 = 1e-9;

/// Update schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrdMode {
    /// All stations respond to the same frozen profile.
    Simultaneous,
    /// Stations respond one after another in index order; one step is a full round.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxSteps,
}

/// One logged step of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub t: usize,
    pub profile: Vec<f64>,
    pub u_hat: Vec<f64>,
    /// Max-norm distance to the previous profile (0 for `t = 0`).
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub steps: Vec<TrajectoryStep>,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl TrajectoryLog {
    pub fn final_profile(&self) -> &[f64] {
        &self.steps.last().expect("trajectory holds the start").profile
    }
}

/// Maximiser of `Û_k` over the interval between the neighbours of `k`.
///
/// Outer stations use the boundary formula, inner stations move to the
/// midpoint of their neighbours. A response that would break the order is
/// clamped into the neighbours' open interval shrunk by `1e-9 L`.
pub fn best_response(k: usize, x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    cfg.check_player(k)?;
    if x.len() != cfg.players() || !is_strictly_ordered(x.positions(), cfg.length()) {
        return Err(Error::OrderViolation(x.positions().to_vec()));
    }
    response(k, x.positions(), cfg)
}

fn response(k: usize, p: &[f64], cfg: &ScenarioConfig) -> Result<f64> {
    let l = cfg.length();
    let kk = p.len();
    let raw = if kk == 1 {
        0.5 * l
    } else if k == 0 {
        edge_response(p[1], cfg)?
    } else if k + 1 == kk {
        l - edge_response(l - p[kk - 2], cfg)?
    } else {
        0.5 * (p[k - 1] + p[k + 1])
    };
    let pad = ORDER_PAD * l;
    let lo = if k == 0 { 0.0 } else { p[k - 1] } + pad;
    let hi = if k + 1 == kk { l } else { p[k + 1] } - pad;
    Ok(raw.clamp(lo, hi))
}

/// Runs best-response dynamics from `x0` until a step moves every station by
/// less than `beta` (max-norm) or `max_steps` steps have been taken.
///
/// Hitting the step cap is reported through `converged = false`.
pub fn run_brd(
    cfg: &ScenarioConfig,
    mode: BrdMode,
    x0: &LocationProfile,
    beta: f64,
    max_steps: usize,
) -> Result<TrajectoryLog> {
    if !(beta > 0.0) {
        return Err(Error::InvalidConfig("beta must be > 0".into()));
    }
    if x0.len() != cfg.players() || !is_strictly_ordered(x0.positions(), cfg.length()) {
        return Err(Error::OrderViolation(x0.positions().to_vec()));
    }
    let mut x = x0.positions().to_vec();
    let mut steps = vec![TrajectoryStep {
        t: 0,
        u_hat: interference_sorted(&x, cfg),
        profile: x.clone(),
        step_norm: 0.0,
    }];
    for t in 1..=max_steps {
        let next = match mode {
            BrdMode::Simultaneous => {
                let frozen = &x;
                (0..frozen.len())
                    .into_par_iter()
                    .map(|k| response(k, frozen, cfg))
                    .collect::<Result<Vec<_>>>()?
            }
            BrdMode::Sequential => {
                let mut y = x.clone();
                for k in 0..y.len() {
                    y[k] = response(k, &y, cfg)?;
                }
                y
            }
        };
        if !is_strictly_ordered(&next, cfg.length()) {
            return Err(Error::OrderViolation(next));
        }
        let step_norm = max_abs_diff(&next, &x);
        x = next;
        steps.push(TrajectoryStep {
            t,
            u_hat: interference_sorted(&x, cfg),
            profile: x.clone(),
            step_norm,
        });
        if step_norm < beta {
            return Ok(TrajectoryLog {
                steps,
                converged: true,
                stop_reason: StopReason::Tolerance,
            });
        }
    }
    Ok(TrajectoryLog {
        steps,
        converged: false,
        stop_reason: StopReason::MaxSteps,
    })
}

/// Evenly spread start from `0.1 L` to `0.9 L` (the centre for one player).
pub fn spread_start(cfg: &ScenarioConfig) -> LocationProfile {
    let l = cfg.length();
    let kk = cfg.players();
    let x = if kk == 1 {
        vec![0.5 * l]
    } else {
        (0..kk).map(|k| l * (0.1 + 0.8 * k as f64 / (kk - 1) as f64)).collect()
    };
    LocationProfile::new(x, cfg).expect("spread start is ordered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::solve_ne;
    use crate::utility::grad_utility;

    fn cfg(k: usize, alpha: f64) -> ScenarioConfig {
        ScenarioConfig::new(100.0, 0.1, alpha, 1e4, k).unwrap()
    }

    #[test]
    fn boundary_response_example() {
        let c = cfg(2, 2.0);
        let x = LocationProfile::new(vec![20.0, 70.7107], &c).unwrap();
        let br = best_response(0, &x, &c).unwrap();
        let expected = (2.0 * 0.01 + 2.0 * 70.7107f64 * 70.7107).sqrt() - 70.7107;
        assert!((br - expected).abs() < 1e-12);
        assert!((br - 29.2893).abs() < 1e-3);
    }

    #[test]
    fn interior_response_is_midpoint() {
        let c = cfg(3, 3.0);
        let x = LocationProfile::new(vec![10.0, 80.0, 90.0], &c).unwrap();
        assert_eq!(best_response(1, &x, &c).unwrap(), 50.0);
    }

    #[test]
    fn response_zeroes_own_gradient() {
        for alpha in [2.0, 3.0] {
            let c = cfg(4, alpha);
            let x = vec![10.0, 30.0, 55.0, 90.0];
            for k in 0..4 {
                let mut y = x.clone();
                y[k] = best_response(k, &LocationProfile::new(x.clone(), &c).unwrap(), &c).unwrap();
                let g = grad_utility(k, &LocationProfile::new(y, &c).unwrap(), &c).unwrap();
                assert!(g.abs() < 1e-8, "alpha {alpha} k {k} grad {g}");
            }
        }
    }

    #[test]
    fn clamps_to_keep_order() {
        // x2 sits so close to the left end that the unconstrained response for
        // player 1 lands on or past it.
        let c = ScenarioConfig::new(100.0, 5.0, 2.0, 1e4, 2).unwrap();
        let x = LocationProfile::new(vec![0.5, 1.0], &c).unwrap();
        let br = best_response(0, &x, &c).unwrap();
        assert!(br < 1.0 && br > 0.0);
    }

    #[test]
    fn two_player_converges_to_ne() {
        let c = cfg(2, 2.0);
        let x0 = LocationProfile::new(vec![10.0, 90.0], &c).unwrap();
        for mode in [BrdMode::Simultaneous, BrdMode::Sequential] {
            let log = run_brd(&c, mode, &x0, 1e-8, DEFAULT_MAX_STEPS).unwrap();
            assert!(log.converged);
            let p = log.final_profile();
            assert!((p[0] - 29.2893).abs() < 1e-4 && (p[1] - 70.7107).abs() < 1e-4);
        }
    }

    #[test]
    fn start_at_equilibrium_does_not_move() {
        let c = cfg(3, 2.0);
        let ne = solve_ne(&c, 1e-12, 100_000).unwrap();
        let log = run_brd(&c, BrdMode::Sequential, &ne.profile, 1e-8, 10).unwrap();
        assert!(log.converged);
        assert_eq!(log.steps.len(), 2);
        assert!(log.steps[1].step_norm < 1e-8);
    }

    #[test]
    fn modes_share_the_limit() {
        let c = cfg(4, 3.0);
        let x0 = spread_start(&c);
        let a = run_brd(&c, BrdMode::Simultaneous, &x0, 1e-10, DEFAULT_MAX_STEPS).unwrap();
        let b = run_brd(&c, BrdMode::Sequential, &x0, 1e-10, DEFAULT_MAX_STEPS).unwrap();
        assert!(max_abs_diff(a.final_profile(), b.final_profile()) < 1e-6);
    }

    #[test]
    fn step_cap_reports_non_convergence() {
        let c = cfg(5, 2.0);
        let log = run_brd(&c, BrdMode::Simultaneous, &spread_start(&c), 1e-12, 3).unwrap();
        assert!(!log.converged);
        assert_eq!(log.stop_reason, StopReason::MaxSteps);
        assert_eq!(log.steps.len(), 4);
    }

    #[test]
    fn invalid_inputs() {
        let c = cfg(2, 2.0);
        let x0 = spread_start(&c);
        assert!(run_brd(&c, BrdMode::Sequential, &x0, 0.0, 10).is_err());
        assert!(best_response(3, &x0, &c).is_err());
    }
}
