use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use locgame_cli::{configure_threads, execute, load_manifest, CliError, Command};

/// Location-game experiments: equilibria, dynamics, learning and oracles.
#[derive(Debug, Parser)]
#[command(name = "locgame", version)]
struct Args {
    command: Command,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for every random component (overrides the file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSVs and the manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// key=value overrides applied after the file.
    overrides: Vec<String>,
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.machine_line());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return fail(CliError::Validation(format!("bad command line: {}", e.kind())));
        }
    };
    if let Err(e) = configure_threads(std::env::var("LOCGAME_THREADS").ok().as_deref()) {
        return fail(e);
    }
    let result = load_manifest(args.command, args.config.as_deref(), &args.overrides, args.seed, args.out)
        .and_then(|m| execute(&m));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
