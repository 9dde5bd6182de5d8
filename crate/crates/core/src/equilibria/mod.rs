//! Nash, Stackelberg and social-optimum profiles, the price of anarchy, and
//! numeric verifiers for the concavity and uniqueness conditions.

mod checks;
mod nash;
mod social;
mod stackelberg;

pub use checks::{check_concavity, check_dsc, concavity_margin, dsc_sum, ConcavityReport, DscReport};
pub use nash::{
    edge_response, ne_system_step, solve_ne, solve_ne_from, two_player_closed_form, DEFAULT_MAX_ITER,
    DEFAULT_TOL_FRACTION,
};
pub use social::{
    poa_from_max, price_of_anarchy, social_max, social_optimum, EquilibriumKind, PoaReport, GRID_FRACTION,
    RANDOM_STARTS,
};
pub use stackelberg::{follower_br, leader_total_derivative, leader_utility, solve_stackelberg, stackelberg_limit};

use crate::error::{Error, Result};
use crate::scenario::{LocationProfile, ScenarioConfig};
use crate::utility::{grad_utility, UtilityReport};

/// How an equilibrium profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    FixedPoint,
    GridRefine,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::FixedPoint => "fixed-point",
            Method::GridRefine => "grid+refine",
        })
    }
}

/// A solved profile with its utilities and solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub profile: LocationProfile,
    pub utilities: UtilityReport,
    /// Largest violation of the first-order conditions that define the profile.
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
}

/// `max_k |∂Û_k/∂x_k|`.
pub fn max_abs_grad(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    (0..cfg.players()).try_fold(0.0f64, |m, k| Ok(m.max(grad_utility(k, x, cfg)?.abs())))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max, iterations)`; the bracket is shrunk below `tol`.
pub(crate) fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut it = 0;
    while b - a > tol {
        if it >= 400 {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: b - a,
                last: vec![0.5 * (a + b)],
            });
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        it += 1;
        // The bracket can stall at floating-point resolution.
        if c >= d {
            break;
        }
    }
    let mut best = (0.5 * (a + b), f(0.5 * (a + b)));
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok((best.0, best.1, it))
}
