//! Flat `key=value` run configuration.
//!
//! One entry per line, `#` starts a comment, numbers may use scientific
//! notation. Lists are comma separated; `start:stop:count` expands to
//! `count` evenly spaced values including both ends.

use std::collections::BTreeMap;
use std::fmt;

use locgame_core::ScenarioConfig;

use crate::error::{CliError, Result};

/// Every key the harness understands.
pub const KNOWN_KEYS: &[&str] = &[
    "L",
    "epsilon",
    "alpha",
    "sigma2",
    "K",
    "seed",
    "tol",
    "max_iter",
    "K_list",
    "alpha_list",
    "epsilon_list",
    "se_tol",
    "mode",
    "beta",
    "max_steps",
    "x0",
    "grid",
    "b",
    "delta",
    "log_every",
    "reward",
    "normalization",
    "u_scale",
    "u_offset",
    "sweep",
    "values",
    "seeds",
    "grid_step",
    "fd_profiles",
    "fd_h",
];

/// Where a value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override(s) => write!(f, "override '{s}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Parsed but untyped configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

fn split_entry(text: &str, origin: &Origin) -> Result<Option<(String, String)>> {
    let body = text.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let parse_err = |message: String| CliError::Parse {
        location: origin.to_string(),
        message,
    };
    let (key, value) = body
        .split_once('=')
        .ok_or_else(|| parse_err(format!("expected key=value, found '{body}'")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() {
        return Err(parse_err("empty key".into()));
    }
    if !KNOWN_KEYS.contains(&key) {
        return Err(parse_err(format!("unknown key '{key}'")));
    }
    if value.is_empty() {
        return Err(parse_err(format!("empty value for '{key}'")));
    }
    Ok(Some((key.to_string(), value.to_string())))
}

/// Parses configuration text. Unknown and repeated keys are rejected.
pub fn parse_config(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    for (i, line) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        if let Some((key, value)) = split_entry(line, &origin)? {
            if let Some(prev) = raw.entries.get(&key) {
                return Err(CliError::Parse {
                    location: origin.to_string(),
                    message: format!("duplicate key '{key}' (first set on {})", prev.origin),
                });
            }
            raw.entries.insert(key, Entry { value, origin });
        }
    }
    Ok(raw)
}

impl RawConfig {
    /// Applies a command-line `key=value` override; later overrides win.
    pub fn apply_override(&mut self, text: &str) -> Result<()> {
        let origin = Origin::Override(text.to_string());
        match split_entry(text, &origin)? {
            Some((key, value)) => {
                self.entries.insert(key, Entry { value, origin });
                Ok(())
            }
            None => Err(CliError::Parse {
                location: origin.to_string(),
                message: "override must be key=value".into(),
            }),
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn typed<T>(&self, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).ok_or_else(|| CliError::Parse {
                location: e.origin.to_string(),
                message: format!("'{key}' expects {what}, found '{}'", e.value),
            }),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.typed(key, "a number", parse_f64)
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.typed(key, "a non-negative integer", parse_usize)
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.typed(key, "a non-negative integer", |s| s.parse().ok())
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.typed(key, "a list of numbers", parse_f64_list)
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.typed(key, "a list of integers", |s| s.split(',').map(|t| parse_usize(t.trim())).collect())
    }

    /// Scenario from `L`, `epsilon`, `alpha`, `sigma2` and `K`, with the
    /// defaults `100, 0.1, 2, 1e4, 2`.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        Ok(ScenarioConfig::new(
            self.f64("L")?.unwrap_or(100.0),
            self.f64("epsilon")?.unwrap_or(0.1),
            self.f64("alpha")?.unwrap_or(2.0),
            self.f64("sigma2")?.unwrap_or(1e4),
            self.usize("K")?.unwrap_or(2),
        )?)
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Integers, also written as `1e5` or `100000.0`.
fn parse_usize(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().or_else(|| {
        let v = parse_f64(s)?;
        (v >= 0.0 && v.fract() == 0.0 && v <= 2f64.powi(53)).then_some(v as usize)
    })
}

fn parse_f64_list(s: &str) -> Option<Vec<f64>> {
    if let [start, stop, count] = s.split(':').map(str::trim).collect::<Vec<_>>()[..] {
        let (a, b, n) = (parse_f64(start)?, parse_f64(stop)?, parse_usize(count)?);
        return match n {
            0 => None,
            1 => Some(vec![a]),
            _ => Some((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    s.split(',').map(|t| parse_f64(t.trim())).collect()
}

/// Shortest round-trip rendering of a float.
pub fn fmt_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_value(*x)).collect::<Vec<_>>().join(",")
}
