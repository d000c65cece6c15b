mod commands;
mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use output::Header;

/// Probabilistic amplitude shaping toolkit: matcher construction, link
/// simulation, error insertion and error-propagation bounds.
#[derive(Parser)]
#[command(name = "pas", version)]
struct Cli {
    /// Experiment file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the experiment file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, env = "PAS_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the lookup tables of a tree spec and write a complete tree file.
    BuildTree { spec: PathBuf, out: PathBuf },
    /// Validate a tree file and report its storage and shaping figures.
    InspectTree { tree: PathBuf },
    /// Pick a CCDM composition for a target PMF ([design_composition]).
    DesignComposition,
    /// Monte-Carlo link simulation ([simulate]).
    Simulate,
    /// Random error insertion into matcher outputs ([insert_errors]).
    InsertErrors,
    /// Analytic post-invDM BER and BBER bounds ([bounds]).
    Bounds,
    /// Shaping figures and BMD rates of a PMF ([metrics]).
    Metrics,
}

struct Loaded {
    cfg: ExperimentConfig,
    bytes: Vec<u8>,
    base: PathBuf,
}

fn load(path: Option<&Path>) -> Result<Loaded> {
    let path = path.context("this command needs --config")?;
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("config is not UTF-8")?;
    let cfg =
        ExperimentConfig::parse(text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { cfg, bytes, base })
}

fn section<T>(s: Option<T>, name: &str) -> Result<T> {
    s.with_context(|| format!("config has no [{name}] table"))
}

fn run(cli: Cli) -> Result<()> {
    let out = &cli.out_dir;
    match &cli.command {
        Command::BuildTree { spec, out: tree } => {
            let bytes = fs::read(spec).with_context(|| format!("reading {}", spec.display()))?;
            let header = Header::new("build-tree", &bytes, &[], 0);
            commands::build_tree(spec, tree, out, &header)
        }
        Command::InspectTree { tree } => {
            let bytes = fs::read(tree).with_context(|| format!("reading {}", tree.display()))?;
            let header = Header::new("inspect-tree", &bytes, &[], 0);
            commands::inspect_tree(tree, out, &header)
        }
        Command::DesignComposition => {
            let l = load(cli.config.as_deref())?;
            let header = Header::new("design-composition", &l.bytes, &[], 0);
            commands::design(
                &section(l.cfg.design_composition, "design_composition")?,
                out,
                &header,
            )
        }
        Command::Simulate => {
            let l = load(cli.config.as_deref())?;
            let seed = cli.seed.or(l.cfg.seed).unwrap_or(0);
            let header = Header::new("simulate", &l.bytes, &[], seed);
            let s = section(l.cfg.simulate, "simulate")?;
            commands::simulate(&s, &l.base, seed, cli.workers, out, &header)
        }
        Command::InsertErrors => {
            let l = load(cli.config.as_deref())?;
            let seed = cli.seed.or(l.cfg.seed).unwrap_or(0);
            let header = Header::new("insert-errors", &l.bytes, &[], seed);
            let s = section(l.cfg.insert_errors, "insert_errors")?;
            commands::insert_errors(&s, &l.base, seed, out, &header)
        }
        Command::Bounds => {
            let l = load(cli.config.as_deref())?;
            let seed = cli.seed.or(l.cfg.seed).unwrap_or(0);
            let header = Header::new("bounds", &l.bytes, &[], seed);
            let s = section(l.cfg.bounds, "bounds")?;
            commands::bounds(&s, &l.base, seed, out, &header)
        }
        Command::Metrics => {
            let l = load(cli.config.as_deref())?;
            let seed = cli.seed.or(l.cfg.seed).unwrap_or(0);
            let header = Header::new("metrics", &l.bytes, &[], seed);
            let s = section(l.cfg.metrics, "metrics")?;
            commands::metrics(&s, &l.base, seed, out, &header)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
