//! Command-line front end for `stimpdc`.
//!
//! Every subcommand produces one table, written as CSV or JSON to `--out`, to
//! `$STIMPDC_OUT_DIR/<command>.<ext>`, or to stdout. Settings resolve as
//! flags > `--config` TOML file > built-in defaults.

pub mod commands;
pub mod config;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{CloneArgs, FlattenArgs, OverlapArgs, Outcome, SpectrumArgs, StateArgs};
use config::{Arithmetic, Destination, FileConfig, FlagConfig, Format, RunConfig, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "stimpdc", version, about = "Stimulated down-conversion OAM cloning calculations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML file with defaults for the options below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Signal/idler beam waist.
    #[arg(long, global = true)]
    pub waist: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest |ell| tabulated.
    #[arg(long, global = true)]
    pub lmax: Option<i32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub arithmetic: Option<Arithmetic>,
    /// Output file; overrides the output directory.
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triple-overlap coefficients, closed form next to quadrature.
    Overlap(OverlapArgs),
    /// OAM pair spectrum.
    Spectrum(SpectrumArgs),
    /// Cloning fidelity by state, counting and closed form.
    Clone(CloneArgs),
    /// Fock-state listing of a seeded down-conversion term.
    State(StateArgs),
    /// Spectrum flattening strategies.
    Flatten(FlattenArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Overlap(_) => "overlap",
            Command::Spectrum(_) => "spectrum",
            Command::Clone(_) => "clone",
            Command::State(_) => "state",
            Command::Flatten(_) => "flatten",
        }
    }
}

impl Cli {
    pub fn resolve(&self, env_out_dir: Option<PathBuf>) -> Result<RunConfig> {
        let file = match &self.global.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let g = &self.global;
        let flags = FlagConfig {
            waist: g.waist,
            tol: g.tol,
            lmax: g.lmax,
            format: g.format,
            arithmetic: g.arithmetic,
            out: g.out.clone(),
        };
        RunConfig::resolve(&flags, &file, env_out_dir, self.command.name())
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Overlap(a) => commands::cmd_overlap(a, cfg),
        Command::Spectrum(a) => commands::cmd_spectrum(a, cfg),
        Command::Clone(a) => commands::cmd_clone(a, cfg),
        Command::State(a) => commands::cmd_state(a, cfg),
        Command::Flatten(a) => commands::cmd_flatten(a, cfg),
    }
}

/// Runs the command and writes its table. Returns the number of failed checks.
pub fn run(cli: &Cli) -> Result<usize> {
    let env_out_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let cfg = cli.resolve(env_out_dir)?;
    let outcome = execute(&cli.command, &cfg)?;
    let text = outcome.table.render(cfg.format)?;
    match &cfg.destination {
        Destination::Stdout => std::io::stdout().lock().write_all(text.as_bytes())?,
        Destination::File(path) => table::write_atomic(path, text.as_bytes())?,
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    Ok(outcome.failures)
}
