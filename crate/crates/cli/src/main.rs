//! `nanoqnd`: guided modes, coupling maps and spin-squeezing runs for atoms
//! next to nanophotonic waveguides.

mod config;
mod error;
mod output;
mod pins;
mod run;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{parse_config, parse_str, preset, Format, RunConfig};
use error::CliError;
use run::{Command, Context};
use std::path::PathBuf;

/// Environment variable naming the default mode-cache directory.
const CACHE_ENV: &str = "NANOQND_CACHE_DIR";

#[derive(Parser)]
#[command(name = "nanoqnd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve (or load) the two fundamental modes and write field maps.
    Modes(Common),
    /// Coupling maps over the transverse plane and around the atom circle.
    Coopmap(Common),
    /// Squeezing trace at the configured atom position.
    Squeeze(Common),
    /// Peak squeezing over a radius or atom-number scan.
    Scan(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file; omitted keys take their defaults.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (overrides [output] directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write only this data format (overrides [output] formats).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Mode-cache directory [env: NANOQND_CACHE_DIR; default: <out>/cache].
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Random seed (overrides [sim] seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Compare the results with the pinned constants of a built-in preset;
    /// exit 4 on mismatch.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn context(args: &Common) -> Result<Context, CliError> {
    let mut config: RunConfig = match (&args.config, &args.preset) {
        (Some(path), _) => parse_config(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => parse_str("")?,
    };
    if let Some(seed) = args.seed {
        config.sim.seed = seed;
    }
    if let Some(f) = args.format {
        config.output.formats = vec![match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }];
    }
    if let Some(out) = &args.out {
        config.output.directory = out.display().to_string();
    }
    let out = PathBuf::from(&config.output.directory);
    let cache_dir = args
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| out.join("cache"));
    Ok(Context { config, out, cache_dir, check: args.check })
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (cmd, args) = match &cli.command {
        Sub::Modes(a) => (Command::Modes, a),
        Sub::Coopmap(a) => (Command::Coopmap, a),
        Sub::Squeeze(a) => (Command::Squeeze, a),
        Sub::Scan(a) => (Command::Scan, a),
    };
    match context(args).and_then(|ctx| run::execute(cmd, &ctx)) {
        Ok(report) => {
            let status = serde_json::json!({
                "status": "ok",
                "command": cmd.name(),
                "out": report.out,
                "files": report.files,
            });
            println!("{status}");
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
