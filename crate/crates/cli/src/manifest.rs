//! Fully resolved description of one harness run.

use std::fmt;
use std::path::PathBuf;

use locgame_core::dynamics::BrdMode;
use locgame_core::learning::{Normalization, RewardSource};
use locgame_core::{LocationProfile, ScenarioConfig};

use crate::config::{fmt_list, fmt_value, RawConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Ne,
    Stackelberg,
    Social,
    Poa,
    Brd,
    Learn,
    Sweep,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ne => "ne",
            Command::Stackelberg => "stackelberg",
            Command::Social => "social",
            Command::Poa => "poa",
            Command::Brd => "brd",
            Command::Learn => "learn",
            Command::Sweep => "sweep",
            Command::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter iterated by the `sweep` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Epsilon,
    Alpha,
    Players,
    Step,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Epsilon => "epsilon",
            SweepParam::Alpha => "alpha",
            SweepParam::Players => "K",
            SweepParam::Step => "b",
        }
    }
}

/// Start profile of a best-response run.
#[derive(Debug, Clone, PartialEq)]
pub enum StartSpec {
    /// Evenly spread from `0.1 L` to `0.9 L`.
    Spread,
    /// Seeded uniform ordered profile.
    Random,
    Explicit(Vec<f64>),
}

/// Typed options; only those relevant to the command are resolved from the
/// configuration, the rest keep their defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Fixed-point tolerance as a fraction of `L`.
    pub tol: f64,
    pub max_iter: usize,
    pub k_list: Vec<usize>,
    pub alpha_list: Vec<f64>,
    pub epsilon_list: Vec<f64>,
    /// Leader search tolerance (absolute).
    pub se_tol: f64,
    pub mode: BrdMode,
    /// Best-response stopping threshold as a fraction of `L`.
    pub beta: f64,
    pub max_steps: usize,
    pub x0: StartSpec,
    pub grid: Vec<f64>,
    pub b: f64,
    pub delta: f64,
    pub log_every: usize,
    pub reward: RewardSource,
    pub normalization: Normalization,
    pub sweep: SweepParam,
    pub values: Vec<f64>,
    pub seeds: usize,
    pub grid_step: f64,
    pub fd_profiles: usize,
    /// Finite-difference step as a fraction of `L`.
    pub fd_h: f64,
}

impl Settings {
    fn defaults(scenario: &ScenarioConfig) -> Self {
        let l = scenario.length();
        Settings {
            tol: 1e-10,
            max_iter: 100_000,
            k_list: vec![scenario.players()],
            alpha_list: vec![scenario.alpha()],
            epsilon_list: vec![scenario.epsilon()],
            se_tol: 1e-10,
            mode: BrdMode::Sequential,
            beta: 1e-8,
            max_steps: 100_000,
            x0: StartSpec::Spread,
            grid: [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|f| f * l).collect(),
            b: 0.01,
            delta: 1e-3,
            log_every: 100,
            reward: RewardSource::GameUtility,
            normalization: Normalization::Range,
            sweep: SweepParam::Step,
            values: vec![0.005, 0.01, 0.02, 0.05, 0.1],
            seeds: 100,
            grid_step: 0.05,
            fd_profiles: 100,
            fd_h: 1e-5,
        }
    }
}

/// A resolved run: scenario, command options, seed and output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub settings: Settings,
    entries: Vec<(&'static str, String)>,
}

fn invalid(msg: String) -> CliError {
    CliError::Validation(msg)
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(msg()))
    }
}

/// Reads keys with defaults and records the canonical value of each.
struct Resolver<'a> {
    raw: &'a RawConfig,
    entries: Vec<(&'static str, String)>,
}

impl Resolver<'_> {
    fn record(&mut self, key: &'static str, value: String) {
        self.entries.push((key, value));
    }

    fn f64(&mut self, key: &'static str, default: f64) -> Result<f64> {
        let v = self.raw.f64(key)?.unwrap_or(default);
        self.record(key, fmt_value(v));
        Ok(v)
    }

    fn usize(&mut self, key: &'static str, default: usize) -> Result<usize> {
        let v = self.raw.usize(key)?.unwrap_or(default);
        self.record(key, v.to_string());
        Ok(v)
    }

    fn f64_list(&mut self, key: &'static str, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.raw.f64_list(key)?.unwrap_or_else(|| default.to_vec());
        self.record(key, fmt_list(&v));
        Ok(v)
    }

    fn usize_list(&mut self, key: &'static str, default: &[usize]) -> Result<Vec<usize>> {
        let v = self.raw.usize_list(key)?.unwrap_or_else(|| default.to_vec());
        self.record(key, v.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
        Ok(v)
    }

    fn choice<T: Copy>(&mut self, key: &'static str, default: &str, options: &[(&str, T)]) -> Result<T> {
        let name = self.raw.get(key).unwrap_or(default);
        let found = options.iter().find(|(n, _)| *n == name).map(|(_, v)| *v);
        let v = found.ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            invalid(format!("'{key}' must be one of {}, got '{name}'", names.join("|")))
        })?;
        self.record(key, name.to_string());
        Ok(v)
    }
}

impl RunManifest {
    /// Resolves the options of `command` from the configuration.
    pub fn resolve(command: Command, raw: &RawConfig, out: PathBuf) -> Result<Self> {
        let scenario = raw.scenario()?;
        let mut s = Settings::defaults(&scenario);
        let mut r = Resolver {
            raw,
            entries: Vec::new(),
        };
        let l = scenario.length();
        r.record("L", fmt_value(l));
        r.record("epsilon", fmt_value(scenario.epsilon()));
        r.record("alpha", fmt_value(scenario.alpha()));
        r.record("sigma2", fmt_value(scenario.sigma2()));
        r.record("K", scenario.players().to_string());
        let seed = raw.u64("seed")?.unwrap_or(1);
        r.record("seed", seed.to_string());

        let needs_two = |what: &str| {
            require(scenario.players() == 2, || {
                format!("{what} needs K = 2, got K = {}", scenario.players())
            })
        };

        match command {
            Command::Ne | Command::Social => {
                s.k_list = r.usize_list("K_list", &s.k_list)?;
                s.alpha_list = r.f64_list("alpha_list", &s.alpha_list)?;
                if command == Command::Ne {
                    resolve_fixed_point(&mut r, &mut s)?;
                }
                for &k in &s.k_list {
                    for &a in &s.alpha_list {
                        scenario.with_players(k)?.with_alpha(a)?;
                    }
                }
            }
            Command::Stackelberg | Command::Poa => {
                needs_two(command.name())?;
                s.epsilon_list = r.f64_list("epsilon_list", &s.epsilon_list)?;
                for &e in &s.epsilon_list {
                    scenario.with_epsilon(e)?;
                }
                resolve_fixed_point(&mut r, &mut s)?;
                s.se_tol = r.f64("se_tol", s.se_tol)?;
                require(s.se_tol > 0.0, || "se_tol > 0".into())?;
            }
            Command::Brd => {
                s.mode = r.choice(
                    "mode",
                    "sequential",
                    &[("sequential", BrdMode::Sequential), ("simultaneous", BrdMode::Simultaneous)],
                )?;
                s.beta = r.f64("beta", s.beta)?;
                require(s.beta > 0.0, || "beta > 0".into())?;
                s.max_steps = r.usize("max_steps", s.max_steps)?;
                require(s.max_steps >= 1, || "max_steps >= 1".into())?;
                s.x0 = match raw.get("x0").unwrap_or("spread") {
                    "spread" => StartSpec::Spread,
                    "random" => StartSpec::Random,
                    _ => {
                        let x = raw.f64_list("x0")?.expect("x0 is present");
                        LocationProfile::new(x.clone(), &scenario)?;
                        StartSpec::Explicit(x)
                    }
                };
                let x0_text = match &s.x0 {
                    StartSpec::Spread => "spread".to_string(),
                    StartSpec::Random => "random".to_string(),
                    StartSpec::Explicit(x) => fmt_list(x),
                };
                r.record("x0", x0_text);
            }
            Command::Learn => {
                s.max_steps = 1_000_000;
                resolve_learning(&mut r, &mut s, &scenario, true)?;
                s.log_every = r.usize("log_every", s.log_every)?;
            }
            Command::Sweep => {
                s.sweep = r.choice(
                    "sweep",
                    "b",
                    &[
                        ("b", SweepParam::Step),
                        ("epsilon", SweepParam::Epsilon),
                        ("alpha", SweepParam::Alpha),
                        ("K", SweepParam::Players),
                    ],
                )?;
                let default_values = match s.sweep {
                    SweepParam::Step => s.values.clone(),
                    SweepParam::Epsilon => vec![0.01, 0.1, 1.0, 10.0],
                    SweepParam::Alpha => vec![2.0, 3.0, 4.0],
                    SweepParam::Players => vec![1.0, 2.0, 3.0, 4.0],
                };
                s.values = r.f64_list("values", &default_values)?;
                require(!s.values.is_empty(), || "values must be non-empty".into())?;
                for &v in &s.values {
                    match s.sweep {
                        SweepParam::Step => require(v > 0.0 && v < 1.0, || format!("0 < b < 1 (b = {v})"))?,
                        SweepParam::Epsilon => drop(scenario.with_epsilon(v)?),
                        SweepParam::Alpha => drop(scenario.with_alpha(v)?),
                        SweepParam::Players => {
                            require(v >= 1.0 && v.fract() == 0.0, || format!("K must be an integer >= 1 (K = {v})"))?
                        }
                    }
                }
                if s.sweep == SweepParam::Step {
                    s.max_steps = 1_000_000;
                    resolve_learning(&mut r, &mut s, &scenario, false)?;
                    s.seeds = r.usize("seeds", s.seeds)?;
                    require(s.seeds >= 1, || "seeds >= 1".into())?;
                } else {
                    resolve_fixed_point(&mut r, &mut s)?;
                }
            }
            Command::Oracle => {
                needs_two("oracle")?;
                s.epsilon_list = r.f64_list("epsilon_list", &s.epsilon_list)?;
                for &e in &s.epsilon_list {
                    scenario.with_epsilon(e)?;
                }
                s.grid = r.f64_list("grid", &s.grid)?;
                validate_grid(&s.grid, &scenario)?;
                s.grid_step = r.f64("grid_step", s.grid_step)?;
                require(s.grid_step > 0.0 && s.grid_step < 0.5 * l, || "0 < grid_step < L/2".into())?;
                s.fd_profiles = r.usize("fd_profiles", s.fd_profiles)?;
                require(s.fd_profiles >= 1, || "fd_profiles >= 1".into())?;
                s.fd_h = r.f64("fd_h", s.fd_h)?;
                require(s.fd_h > 0.0 && s.fd_h < 1e-2, || "0 < fd_h < 1e-2".into())?;
                let a = scenario.alpha();
                require(a == 2.0 || a == 3.0, || format!("gradient oracle needs alpha 2 or 3 (alpha = {a})"))?;
            }
        }

        Ok(RunManifest {
            command,
            scenario,
            seed,
            out,
            settings: s,
            entries: r.entries,
        })
    }

    /// One-line echo used as the first line of every CSV.
    pub fn echo(&self) -> String {
        let mut line = format!("# locgame command={}", self.command);
        for (k, v) in &self.entries {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }

    /// Configuration text that resolves back to this manifest.
    pub fn to_config_text(&self) -> String {
        let mut text = format!("# command={}\n", self.command);
        for (k, v) in &self.entries {
            text.push_str(&format!("{k}={v}\n"));
        }
        text
    }

    pub fn entries(&self) -> &[(&'static str, String)] {
        &self.entries
    }
}

fn resolve_fixed_point(r: &mut Resolver<'_>, s: &mut Settings) -> Result<()> {
    s.tol = r.f64("tol", s.tol)?;
    require(s.tol > 0.0, || "tol > 0".into())?;
    s.max_iter = r.usize("max_iter", s.max_iter)?;
    require(s.max_iter >= 1, || "max_iter >= 1".into())
}

fn validate_grid(grid: &[f64], scenario: &ScenarioConfig) -> Result<()> {
    require(!grid.is_empty(), || "grid must be non-empty".into())?;
    require(grid.windows(2).all(|w| w[0] < w[1]), || "grid sorted strictly ascending".into())?;
    require(grid.iter().all(|&y| (0.0..=scenario.length()).contains(&y)), || {
        "grid points within [0, L]".into()
    })
}

fn resolve_learning(r: &mut Resolver<'_>, s: &mut Settings, scenario: &ScenarioConfig, with_step: bool) -> Result<()> {
    s.grid = r.f64_list("grid", &s.grid)?;
    validate_grid(&s.grid, scenario)?;
    // A step sweep takes its steps from `values`.
    if with_step {
        s.b = r.f64("b", s.b)?;
        require(s.b > 0.0 && s.b < 1.0, || format!("0 < b < 1 (b = {})", s.b))?;
    }
    s.max_steps = r.usize("max_steps", s.max_steps)?;
    require(s.max_steps >= 1, || "max_steps >= 1".into())?;
    s.delta = r.f64("delta", s.delta)?;
    require(s.delta > 0.0 && s.delta < 1.0, || format!("0 < delta < 1 (delta = {})", s.delta))?;
    s.reward = r.choice(
        "reward",
        "u_hat",
        &[("u_hat", RewardSource::GameUtility), ("capacity", RewardSource::Capacity)],
    )?;
    let kind = r.choice("normalization", "range", &[("range", 0u8), ("max", 1), ("fixed", 2)])?;
    s.normalization = match kind {
        0 => Normalization::Range,
        1 => Normalization::Max,
        _ => {
            let scale = r.f64("u_scale", 1.0)?;
            let offset = r.f64("u_offset", 0.0)?;
            require(scale > 0.0, || "u_scale > 0".into())?;
            Normalization::Fixed { offset, scale }
        }
    };
    Ok(())
}
