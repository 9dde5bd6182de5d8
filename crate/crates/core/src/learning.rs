//! Discrete stochastic learning with linear reward-inaction automata.
//!
//! Every player keeps a probability vector over its own finite location grid.
//! Each step all players sample a location, observe a reward in `[0, 1]`, and
//! move probability mass toward the sampled location in proportion to the
//! reward: `p_i += b u (1 - p_i)` for the chosen action and `p_j -= b u p_j`
//! for the others.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::utility::{capacity_sorted, interference_sorted};

/// Offset applied to coincident samples, as a fraction of `L`.
const TIE_SHIFT: f64 = 1e-9;

/// Which utility the automata observe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewardSource {
    /// Game utility `Û_k`.
    #[default]
    GameUtility,
    /// Capacity-sum utility.
    Capacity,
}

/// How raw utilities are mapped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Normalization {
    /// `(U - min) / (max - min)` with the extremes taken over all grid
    /// profiles with distinct positions.
    #[default]
    Range,
    /// `U / max` over the same profiles.
    Max,
    /// Explicit `(U - offset) / scale`.
    Fixed { offset: f64, scale: f64 },
}

/// Resolved affine reward map `u = clamp((U - offset) / scale, 0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardScale {
    pub offset: f64,
    pub scale: f64,
}

impl RewardScale {
    pub fn apply(&self, utility: f64) -> f64 {
        ((utility - self.offset) / self.scale).clamp(0.0, 1.0)
    }
}

/// Parameters of a learning run.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningConfig {
    pub grids: Vec<Vec<f64>>,
    /// Learning step `b` in `(0, 1)`.
    pub step: f64,
    pub max_steps: usize,
    pub seed: u64,
    /// A player has converged once its largest probability exceeds `1 - delta`.
    pub delta: f64,
    pub reward: RewardSource,
    pub normalization: Normalization,
    /// Keep every `log_every`-th probability snapshot (0 keeps only the ends).
    pub log_every: usize,
}

impl LearningConfig {
    /// Same grid for every player, default stopping rule and reward map.
    pub fn shared_grid(grid: Vec<f64>, players: usize, step: f64, seed: u64) -> Self {
        Self {
            grids: vec![grid; players],
            step,
            max_steps: 1_000_000,
            seed,
            delta: 1e-3,
            reward: RewardSource::default(),
            normalization: Normalization::default(),
            log_every: 0,
        }
    }

    pub fn validate(&self, cfg: &ScenarioConfig) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.grids.len() != cfg.players() {
            return bad(format!("{} grids for K = {}", self.grids.len(), cfg.players()));
        }
        for (k, g) in self.grids.iter().enumerate() {
            if g.is_empty() {
                return bad(format!("grid of player {k} is empty"));
            }
            if !g.windows(2).all(|w| w[0] < w[1]) {
                return bad(format!("grid of player {k} is not sorted ascending"));
            }
            if g.iter().any(|&y| !(0.0..=cfg.length()).contains(&y)) {
                return bad(format!("grid of player {k} leaves [0, L]"));
            }
        }
        if !(self.step > 0.0 && self.step < 1.0) {
            return bad(format!("learning step b = {} outside (0, 1)", self.step));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} outside (0, 1)", self.delta));
        }
        if let Normalization::Fixed { scale, .. } = self.normalization {
            if !(scale > 0.0) {
                return bad("reward scale must be > 0".into());
            }
        }
        Ok(())
    }
}

/// Per-player probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    pub probs: Vec<Vec<f64>>,
}

impl MixedState {
    /// Index of the most likely action of every player (lowest index on ties).
    pub fn modes(&self) -> Vec<usize> {
        self.probs
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                    .0
            })
            .collect()
    }

    pub fn is_converged(&self, delta: f64) -> bool {
        self.probs.iter().all(|p| p.iter().any(|&v| v > 1.0 - delta))
    }
}

/// Uniform distributions `p_ki = 1/m_k`.
pub fn init_state(lcfg: &LearningConfig) -> MixedState {
    MixedState {
        probs: lcfg.grids.iter().map(|g| vec![1.0 / g.len() as f64; g.len()]).collect(),
    }
}

/// Reward-inaction update of one probability vector, renormalised afterwards.
pub fn reinforce(p: &mut [f64], chosen: usize, step: f64, reward: f64) {
    let gain = step * reward;
    if gain == 0.0 {
        return;
    }
    for (i, v) in p.iter_mut().enumerate() {
        if i == chosen {
            *v += gain * (1.0 - *v);
        } else {
            *v -= gain * *v;
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
}

/// Inverse-CDF sample; ties resolve toward the lower index.
fn sample_index<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &v) in p.iter().enumerate() {
        acc += v;
        if u < acc {
            return i;
        }
    }
    // Rounding left u above the total: take the last action with mass.
    p.iter().rposition(|&v| v > 0.0).unwrap_or(p.len() - 1)
}

/// Utilities of the players at the given grid actions.
///
/// Players are ranked by position; players that share a location are spread
/// by `±1e-9 L` in index order for the evaluation only.
pub fn profile_utilities(actions: &[usize], lcfg: &LearningConfig, cfg: &ScenarioConfig) -> Vec<f64> {
    let positions: Vec<f64> = actions.iter().zip(&lcfg.grids).map(|(&a, g)| g[a]).collect();
    let shifted = separate_ties(&positions, TIE_SHIFT * cfg.length(), cfg.length());
    let mut order: Vec<usize> = (0..shifted.len()).collect();
    order.sort_by(|&a, &b| shifted[a].total_cmp(&shifted[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| shifted[i]).collect();
    let values = match lcfg.reward {
        RewardSource::GameUtility => interference_sorted(&sorted, cfg),
        RewardSource::Capacity => capacity_sorted(&sorted, cfg),
    };
    let mut out = vec![0.0; positions.len()];
    for (rank, &player) in order.iter().enumerate() {
        out[player] = values[rank];
    }
    out
}

fn separate_ties(positions: &[f64], shift: f64, length: f64) -> Vec<f64> {
    let mut out = positions.to_vec();
    let mut seen = vec![false; positions.len()];
    for i in 0..positions.len() {
        if seen[i] {
            continue;
        }
        let group: Vec<usize> = (i..positions.len()).filter(|&j| positions[j] == positions[i]).collect();
        if group.len() > 1 {
            let m = group.len() as f64;
            for (r, &j) in group.iter().enumerate() {
                out[j] = (positions[j] + (2.0 * r as f64 - (m - 1.0)) * shift).clamp(0.0, length);
            }
        }
        group.iter().for_each(|&j| seen[j] = true);
    }
    out
}

/// One row of the discretised game's payoff table.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffEntry {
    pub actions: Vec<usize>,
    pub utilities: Vec<f64>,
}

/// Every joint action of the discretised game, in lexicographic order.
pub fn payoff_table(lcfg: &LearningConfig, cfg: &ScenarioConfig) -> Vec<PayoffEntry> {
    let sizes: Vec<usize> = lcfg.grids.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut code| {
            let mut actions = vec![0; sizes.len()];
            for k in (0..sizes.len()).rev() {
                actions[k] = code % sizes[k];
                code /= sizes[k];
            }
            let utilities = profile_utilities(&actions, lcfg, cfg);
            PayoffEntry { actions, utilities }
        })
        .collect()
}

fn table_index(actions: &[usize], sizes: &[usize]) -> usize {
    actions.iter().zip(sizes).fold(0, |acc, (&a, &m)| acc * m + a)
}

/// Joint actions from which no player gains by a unilateral deviation.
pub fn pure_nash_profiles(table: &[PayoffEntry], lcfg: &LearningConfig) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = lcfg.grids.iter().map(Vec::len).collect();
    table
        .iter()
        .filter(|e| {
            (0..sizes.len()).all(|k| {
                (0..sizes[k]).all(|alt| {
                    let mut dev = e.actions.clone();
                    dev[k] = alt;
                    table[table_index(&dev, &sizes)].utilities[k] <= e.utilities[k]
                })
            })
        })
        .map(|e| e.actions.clone())
        .collect()
}

fn location_set(actions: &[usize], lcfg: &LearningConfig) -> Vec<f64> {
    let mut x: Vec<f64> = actions.iter().zip(&lcfg.grids).map(|(&a, g)| g[a]).collect();
    x.sort_by(f64::total_cmp);
    x
}

/// Resolves the reward map for a configuration.
pub fn reward_scale(lcfg: &LearningConfig, cfg: &ScenarioConfig) -> RewardScale {
    let extremes = || {
        payoff_table(lcfg, cfg)
            .into_iter()
            .filter(|e| {
                let x = location_set(&e.actions, lcfg);
                x.windows(2).all(|w| w[0] < w[1])
            })
            .flat_map(|e| e.utilities)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| (lo.min(u), hi.max(u)))
    };
    match lcfg.normalization {
        Normalization::Fixed { offset, scale } => RewardScale { offset, scale },
        Normalization::Max => {
            let (_, hi) = extremes();
            RewardScale { offset: 0.0, scale: hi }
        }
        Normalization::Range => {
            let (lo, hi) = extremes();
            let scale = if hi > lo { hi - lo } else { hi.abs().max(f64::MIN_POSITIVE) };
            RewardScale { offset: lo, scale }
        }
    }
}

/// Result of one learning step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: MixedState,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
}

/// Sample, evaluate and update every player once.
pub fn learning_step<R: Rng + ?Sized>(
    state: &MixedState,
    lcfg: &LearningConfig,
    scale: &RewardScale,
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> StepOutcome {
    let actions: Vec<usize> = state.probs.iter().map(|p| sample_index(p, rng)).collect();
    let rewards: Vec<f64> = profile_utilities(&actions, lcfg, cfg)
        .into_iter()
        .map(|u| scale.apply(u))
        .collect();
    let mut next = state.clone();
    for ((p, &a), &u) in next.probs.iter_mut().zip(&actions).zip(&rewards) {
        reinforce(p, a, lcfg.step, u);
    }
    StepOutcome {
        state: next,
        actions,
        rewards,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningRecord {
    pub t: usize,
    pub probs: Vec<Vec<f64>>,
}

/// Decimated probability history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningLog {
    pub records: Vec<LearningRecord>,
    pub steps: usize,
    pub converged: bool,
}

/// Runs the automata until every player is `delta`-concentrated or the step
/// cap is reached (`converged = false`).
pub fn run_learning(lcfg: &LearningConfig, cfg: &ScenarioConfig) -> Result<(MixedState, LearningLog)> {
    lcfg.validate(cfg)?;
    let scale = reward_scale(lcfg, cfg);
    Ok(run_with_scale(lcfg, &scale, cfg))
}

fn run_with_scale(lcfg: &LearningConfig, scale: &RewardScale, cfg: &ScenarioConfig) -> (MixedState, LearningLog) {
    let mut rng = ChaCha8Rng::seed_from_u64(lcfg.seed);
    let mut state = init_state(lcfg);
    let mut records = vec![LearningRecord {
        t: 0,
        probs: state.probs.clone(),
    }];
    let mut t = 0;
    let mut converged = state.is_converged(lcfg.delta);
    while !converged && t < lcfg.max_steps {
        state = learning_step(&state, lcfg, scale, cfg, &mut rng).state;
        t += 1;
        converged = state.is_converged(lcfg.delta);
        if lcfg.log_every > 0 && t % lcfg.log_every == 0 {
            records.push(LearningRecord {
                t,
                probs: state.probs.clone(),
            });
        }
    }
    if records.last().is_some_and(|r| r.t != t) {
        records.push(LearningRecord {
            t,
            probs: state.probs.clone(),
        });
    }
    (
        state,
        LearningLog {
            records,
            steps: t,
            converged,
        },
    )
}

/// Convergence statistics for one learning step value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub step: f64,
    pub mean_steps: f64,
    pub median_steps: f64,
    /// Fraction of runs whose modal profile is a pure equilibrium of the
    /// discretised game (compared as location sets).
    pub ne_hit_fraction: f64,
    pub converged_fraction: f64,
}

/// Runs `seeds` independent runs (seeds `lcfg.seed, lcfg.seed + 1, ...`) per step value.
///
/// Rows follow the order of `steps`; non-converged runs count `max_steps`.
pub fn convergence_time_sweep(
    steps: &[f64],
    seeds: usize,
    lcfg: &LearningConfig,
    cfg: &ScenarioConfig,
) -> Result<Vec<SweepRow>> {
    lcfg.validate(cfg)?;
    if seeds == 0 {
        return Err(Error::InvalidConfig("seeds must be >= 1".into()));
    }
    for &b in steps {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidConfig(format!("learning step b = {b} outside (0, 1)")));
        }
    }
    let scale = reward_scale(lcfg, cfg);
    let table = payoff_table(lcfg, cfg);
    let equilibria: Vec<Vec<f64>> = pure_nash_profiles(&table, lcfg)
        .iter()
        .map(|a| location_set(a, lcfg))
        .collect();
    let rows = steps
        .iter()
        .map(|&b| {
            let runs: Vec<(usize, bool, bool)> = (0..seeds)
                .into_par_iter()
                .map(|i| {
                    let run_cfg = LearningConfig {
                        step: b,
                        seed: lcfg.seed.wrapping_add(i as u64),
                        log_every: 0,
                        ..lcfg.clone()
                    };
                    let (state, log) = run_with_scale(&run_cfg, &scale, cfg);
                    let hit = log.converged && equilibria.contains(&location_set(&state.modes(), lcfg));
                    (log.steps, log.converged, hit)
                })
                .collect();
            summarize(b, &runs)
        })
        .collect();
    Ok(rows)
}

fn summarize(step: f64, runs: &[(usize, bool, bool)]) -> SweepRow {
    let n = runs.len() as f64;
    let mut times: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 { times[mid] } else { 0.5 * (times[mid - 1] + times[mid]) };
    SweepRow {
        step,
        mean_steps: times.iter().sum::<f64>() / n,
        median_steps: median,
        ne_hit_fraction: runs.iter().filter(|r| r.2).count() as f64 / n,
        converged_fraction: runs.iter().filter(|r| r.1).count() as f64 / n,
    }
}

/// Location sets of the pure equilibria of the discretised game.
pub fn discrete_equilibria(lcfg: &LearningConfig, cfg: &ScenarioConfig) -> Vec<Vec<f64>> {
    let mut sets: Vec<Vec<f64>> = pure_nash_profiles(&payoff_table(lcfg, cfg), lcfg)
        .iter()
        .map(|a| location_set(a, lcfg))
        .collect();
    sets.dedup();
    sets
}
