//! Batch harness for the location game: configuration parsing, run
//! manifests, experiment commands and CSV output.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod manifest;
pub mod oracle;

use std::fs;
use std::path::{Path, PathBuf};

pub use commands::{run_command, Outcome};
pub use config::{parse_config, RawConfig};
pub use error::{CliError, Result};
pub use manifest::{Command, RunManifest};

/// Name of the manifest file written next to the CSVs.
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Builds the manifest from an optional config file, `key=value` overrides
/// and an optional seed flag (flags win over the file).
pub fn load_manifest(
    command: Command,
    config: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
    out: PathBuf,
) -> Result<RunManifest> {
    let mut raw = match config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => RawConfig::default(),
    };
    for o in overrides {
        raw.apply_override(o)?;
    }
    if let Some(seed) = seed {
        raw.apply_override(&format!("seed={seed}"))?;
    }
    RunManifest::resolve(command, &raw, out)
}

/// Runs a manifest and writes its CSVs and `manifest.txt` into `m.out`.
///
/// Outputs are written even when an embedded check fails; the failure is
/// returned afterwards. Returns the written paths.
pub fn execute(m: &RunManifest) -> Result<Vec<PathBuf>> {
    let outcome = run_command(m)?;
    fs::create_dir_all(&m.out)?;
    let mut written = Vec::new();
    for csv in &outcome.files {
        let path = m.out.join(csv.name());
        fs::write(&path, csv.text())?;
        written.push(path);
    }
    let path = m.out.join(MANIFEST_FILE);
    fs::write(&path, m.to_config_text())?;
    written.push(path);
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

/// Sizes the global thread pool from `LOCGAME_THREADS` when it is set.
pub fn configure_threads(value: Option<&str>) -> Result<()> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Validation(format!("LOCGAME_THREADS must be an integer >= 1, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Invariant(format!("thread pool: {e}")))
}
