//! Numeric witnesses for own-position concavity and diagonal strict concavity
//! on randomly drawn ordered profiles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scenario::{random_ordered_profile, LocationProfile, ScenarioConfig};
use crate::utility::{grad_unchecked, hessian_diag};

/// Outcome of [`check_concavity`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub samples: usize,
    pub passed: bool,
    /// Largest `∂²Û_k/∂x_k²` seen; negative when the check passes.
    pub worst_margin: f64,
    pub worst_profile: Vec<f64>,
}

/// Outcome of [`check_dsc`].
#[derive(Debug, Clone, PartialEq)]
pub struct DscReport {
    pub pairs: usize,
    pub passed: bool,
    /// Smallest DSC sum seen; positive when the check passes.
    pub min_value: f64,
}

/// Checks `∂²Û_k/∂x_k² < 0` for every player on `samples` random ordered profiles.
pub fn check_concavity(cfg: &ScenarioConfig, samples: usize, seed: u64) -> Result<ConcavityReport> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_profile = Vec::new();
    for _ in 0..samples {
        let x = random_ordered_profile(cfg, &mut rng);
        let m = concavity_margin(&x, cfg)?;
        if m > worst {
            worst = m;
            worst_profile = x.positions().to_vec();
        }
    }
    Ok(ConcavityReport {
        samples,
        passed: worst < 0.0,
        worst_margin: worst,
        worst_profile,
    })
}

/// Largest own-position second derivative at `x`.
pub fn concavity_margin(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<f64> {
    (0..cfg.players()).try_fold(f64::NEG_INFINITY, |m, k| Ok(m.max(hessian_diag(k, x, cfg)?)))
}

/// `Σ_k (a'_k - a_k)(∂Û_k/∂x_k(a) - ∂Û_k/∂x_k(a'))`.
pub fn dsc_sum(a: &LocationProfile, b: &LocationProfile, cfg: &ScenarioConfig) -> f64 {
    let (pa, pb) = (a.positions(), b.positions());
    (0..pa.len())
        .map(|k| (pb[k] - pa[k]) * (grad_unchecked(k, pa, cfg) - grad_unchecked(k, pb, cfg)))
        .sum()
}

/// Checks the DSC sum is strictly positive on `pairs` random pairs of distinct profiles.
pub fn check_dsc(cfg: &ScenarioConfig, pairs: usize, seed: u64) -> Result<DscReport> {
    if pairs == 0 {
        return Err(Error::InvalidConfig("pairs must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_value = f64::INFINITY;
    let mut drawn = 0;
    while drawn < pairs {
        let a = random_ordered_profile(cfg, &mut rng);
        let b = random_ordered_profile(cfg, &mut rng);
        if a == b {
            continue;
        }
        drawn += 1;
        min_value = min_value.min(dsc_sum(&a, &b, cfg));
    }
    Ok(DscReport {
        pairs,
        passed: min_value > 0.0,
        min_value,
    })
}
