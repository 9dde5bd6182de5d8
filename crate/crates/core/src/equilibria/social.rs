//! Social optimum, the maximum of `Σ_k Û_k` over ordered profiles, and the
//! price of anarchy of an equilibrium.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{golden_section_max, EquilibriumResult, Method};
use crate::error::Result;
use crate::scenario::{random_ordered_profile, LocationProfile, ScenarioConfig};
use crate::utility::{interference_sorted, social_gradient, utilities};

/// Random ordered starts added to the social-optimum seed.
pub const RANDOM_STARTS: usize = 8;
/// Seed of the random starts; fixed so reports are reproducible.
pub const START_SEED: u64 = 0x50c1_a1;
/// Grid step of the first coordinate pass, as a fraction of `L`.
pub const GRID_FRACTION: f64 = 1.0 / 2000.0;
const MAX_SWEEPS: usize = 500;

/// Equal cells with centred stations, `x_k = (2k-1)L/(2K)`.
pub fn social_optimum(cfg: &ScenarioConfig) -> Result<EquilibriumResult> {
    let profile = LocationProfile::cell_centers(cfg);
    let residual = social_gradient(&profile, cfg)?
        .iter()
        .fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(EquilibriumResult {
        utilities: utilities(&profile, cfg)?,
        profile,
        residual,
        iterations: 0,
        method: Method::ClosedForm,
    })
}

/// Which equilibrium a price-of-anarchy report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Nash,
    Stackelberg,
    SocialOptimum,
}

/// Ratio of the best achievable utility sum to the sum at an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct PoaReport {
    pub social_max: f64,
    pub social_argmax: Vec<f64>,
    pub eq_sum: f64,
    pub poa: f64,
    pub eq_kind: EquilibriumKind,
}

fn sum_at(x: &[f64], cfg: &ScenarioConfig) -> f64 {
    interference_sorted(x, cfg).iter().sum()
}

/// Feasible open interval for coordinate `k`, kept a hair inside the neighbours.
fn coordinate_bounds(x: &[f64], k: usize, cfg: &ScenarioConfig) -> (f64, f64) {
    let l = cfg.length();
    let pad = 1e-9 * l;
    let lo = if k == 0 { 0.0 } else { x[k - 1] } + pad;
    let hi = if k + 1 == x.len() { l } else { x[k + 1] } - pad;
    (lo, hi)
}

/// Coordinate ascent on `Σ Û_k`: a grid pass at step `L/2000` followed by
/// golden-section refinement until a sweep no longer improves the sum.
fn local_ascent(start: &[f64], cfg: &ScenarioConfig) -> (Vec<f64>, f64) {
    let step = GRID_FRACTION * cfg.length();
    let mut x = start.to_vec();
    let mut value = sum_at(&x, cfg);
    for sweep in 0..MAX_SWEEPS {
        let before = value;
        for k in 0..x.len() {
            let (lo, hi) = coordinate_bounds(&x, k, cfg);
            if hi <= lo {
                continue;
            }
            let eval = |v: f64, x: &mut Vec<f64>| {
                let keep = x[k];
                x[k] = v;
                let s = sum_at(x, cfg);
                x[k] = keep;
                s
            };
            let (mut blo, mut bhi) = (lo, hi);
            if sweep == 0 {
                let n = ((hi - lo) / step).floor() as usize;
                let mut best = (x[k], value);
                for j in 0..=n {
                    let v = lo + j as f64 * step;
                    let s = eval(v, &mut x);
                    if s > best.1 {
                        best = (v, s);
                    }
                }
                blo = (best.0 - step).max(lo);
                bhi = (best.0 + step).min(hi);
            }
            let mut scratch = x.clone();
            let Ok((v, s, _)) = golden_section_max(|v| eval(v, &mut scratch), blo, bhi, 1e-12 * cfg.length()) else {
                continue;
            };
            if s > value {
                x[k] = v;
                value = s;
            }
        }
        if value - before <= 1e-15 * value.abs() && sweep > 0 {
            break;
        }
    }
    (x, value)
}

/// Best of `a` and `b`; equal maxima resolve to the lexicographically smaller profile.
fn better(a: (Vec<f64>, f64), b: (Vec<f64>, f64)) -> (Vec<f64>, f64) {
    use std::cmp::Ordering;
    match a.1.total_cmp(&b.1) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            let lexi = a.0.iter().zip(&b.0).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne());
            if lexi == Some(Ordering::Greater) {
                b
            } else {
                a
            }
        }
    }
}

/// Maximum of the social utility over ordered profiles, by multi-start
/// local ascent from the social optimum and [`RANDOM_STARTS`] seeded starts.
pub fn social_max(cfg: &ScenarioConfig) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut starts = vec![LocationProfile::cell_centers(cfg).into_inner()];
    starts.extend((0..RANDOM_STARTS).map(|_| random_ordered_profile(cfg, &mut rng).into_inner()));
    let results: Vec<_> = starts.par_iter().map(|s| local_ascent(s, cfg)).collect();
    results.into_iter().reduce(better).expect("non-empty starts")
}

/// Price of anarchy of `eq` for the scenario it was solved in.
pub fn price_of_anarchy(eq: &EquilibriumResult, kind: EquilibriumKind, cfg: &ScenarioConfig) -> PoaReport {
    let (social_argmax, social_max) = social_max(cfg);
    poa_from_max(eq, kind, social_argmax, social_max)
}

/// Price of anarchy against a precomputed social maximum.
pub fn poa_from_max(eq: &EquilibriumResult, kind: EquilibriumKind, argmax: Vec<f64>, max: f64) -> PoaReport {
    let eq_sum = eq.utilities.sum_u_hat();
    PoaReport {
        social_max: max,
        social_argmax: argmax,
        eq_sum,
        poa: max / eq_sum,
        eq_kind: kind,
    }
}
