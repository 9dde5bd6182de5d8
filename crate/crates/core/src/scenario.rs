//! Scenario parameters, location profiles and the nearest-station partition
//! of the segment `[0, L]`.

use crate::error::{Error, Result};

/// Physical and game parameters of a `K`-player segment game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    length: f64,
    epsilon: f64,
    alpha: f64,
    sigma2: f64,
    players: usize,
}

impl ScenarioConfig {
    /// Validates and builds a scenario.
    ///
    /// `length` is the segment length `L`, `epsilon` the antenna height,
    /// `alpha` the path-loss exponent, `sigma2` the noise power and
    /// `players` the number of base stations `K`.
    pub fn new(length: f64, epsilon: f64, alpha: f64, sigma2: f64, players: usize) -> Result<Self> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::InvalidConfig(msg.to_string())) };
        check(length.is_finite() && length > 0.0, "L must be > 0")?;
        check(epsilon.is_finite() && epsilon > 0.0, "epsilon must be > 0")?;
        check(alpha.is_finite() && alpha >= 2.0, "alpha must be >= 2")?;
        check(sigma2.is_finite() && sigma2 > 0.0, "sigma2 must be > 0")?;
        check(players >= 1, "K must be >= 1")?;
        if epsilon >= length {
            log::warn!("epsilon = {epsilon} is not small relative to L = {length}");
        }
        Ok(Self {
            length,
            epsilon,
            alpha,
            sigma2,
            players,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Same scenario with a different number of players.
    pub fn with_players(&self, players: usize) -> Result<Self> {
        Self::new(self.length, self.epsilon, self.alpha, self.sigma2, players)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.length, epsilon, self.alpha, self.sigma2, self.players)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.length, self.epsilon, alpha, self.sigma2, self.players)
    }

    pub(crate) fn check_player(&self, k: usize) -> Result<()> {
        if k < self.players {
            Ok(())
        } else {
            Err(Error::PlayerIndex {
                index: k,
                players: self.players,
            })
        }
    }
}

/// Base-station positions satisfying `0 < x_1 < ... < x_K < L`.
///
/// Players are indexed from zero in the API.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationProfile(Vec<f64>);

impl LocationProfile {
    /// Builds a profile for `cfg`, checking the strict order and the player count.
    pub fn new(positions: Vec<f64>, cfg: &ScenarioConfig) -> Result<Self> {
        if positions.len() != cfg.players() {
            return Err(Error::InvalidConfig(format!(
                "profile has {} positions, scenario has K = {}",
                positions.len(),
                cfg.players()
            )));
        }
        if !is_strictly_ordered(&positions, cfg.length()) {
            return Err(Error::OrderViolation(positions));
        }
        Ok(Self(positions))
    }

    /// Equal-width cells with each station at its cell centre: `x_k = (2k-1)L/(2K)`.
    pub fn cell_centers(cfg: &ScenarioConfig) -> Self {
        let k = cfg.players() as f64;
        Self(
            (0..cfg.players())
                .map(|i| (2.0 * i as f64 + 1.0) * cfg.length() / (2.0 * k))
                .collect(),
        )
    }

    pub fn positions(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Mirror image `x'_k = L - x_{K+1-k}`.
    pub fn reflect(&self, cfg: &ScenarioConfig) -> Self {
        Self(self.0.iter().rev().map(|x| cfg.length() - x).collect())
    }

    /// Largest coordinate-wise distance to another profile.
    pub fn max_distance(&self, other: &LocationProfile) -> f64 {
        max_abs_diff(&self.0, &other.0)
    }
}

/// Uniformly drawn ordered profile (sorted i.i.d. uniform positions on `(0, L)`).
pub fn random_ordered_profile<R: rand::Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> LocationProfile {
    loop {
        let mut x: Vec<f64> = (0..cfg.players()).map(|_| rng.random::<f64>() * cfg.length()).collect();
        x.sort_by(f64::total_cmp);
        if is_strictly_ordered(&x, cfg.length()) {
            return LocationProfile(x);
        }
    }
}

pub(crate) fn is_strictly_ordered(x: &[f64], length: f64) -> bool {
    x.iter().all(|v| v.is_finite())
        && x.first().is_some_and(|&v| v > 0.0)
        && x.last().is_some_and(|&v| v < length)
        && x.windows(2).all(|w| w[0] < w[1])
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Nearest-station cells: cell `k` is `[b_k, b_{k+1}]` with midpoint boundaries.
///
/// A terminal exactly equidistant from two stations is attached to the lower
/// index; the boundary point has measure zero and does not affect integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    boundaries: Vec<f64>,
}

impl CellPartition {
    /// Partition built from non-decreasing positions without validating order.
    pub(crate) fn from_sorted(x: &[f64], length: f64) -> Self {
        let mut boundaries = Vec::with_capacity(x.len() + 1);
        boundaries.push(0.0);
        boundaries.extend(x.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        boundaries.push(length);
        Self { boundaries }
    }

    /// All `K + 1` boundaries `0 = b_0 <= ... <= b_K = L`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn cell(&self, k: usize) -> (f64, f64) {
        (self.boundaries[k], self.boundaries[k + 1])
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.boundaries.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the cell serving a terminal at `z` (ties go to the lower index).
    pub fn owner(&self, z: f64) -> usize {
        let inner = &self.boundaries[1..self.boundaries.len() - 1];
        inner.partition_point(|&b| b < z)
    }
}

/// Cells of influence for an ordered profile.
pub fn partition(x: &LocationProfile, cfg: &ScenarioConfig) -> Result<CellPartition> {
    if x.len() != cfg.players() || !is_strictly_ordered(x.positions(), cfg.length()) {
        return Err(Error::OrderViolation(x.positions().to_vec()));
    }
    Ok(CellPartition::from_sorted(x.positions(), cfg.length()))
}
