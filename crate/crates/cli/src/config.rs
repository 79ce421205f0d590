//! Run configuration: command-line flags override the config file, which overrides the
//! built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

/// Names the directory outputs go to when no `--out` path is given.
pub const OUT_DIR_ENV: &str = "STIMPDC_OUT_DIR";

pub const DEFAULT_WAIST: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `Auto` uses exact arithmetic when the instance has at most a million pair
/// distributions and floating point otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Auto,
    Exact,
    Float,
}

/// Keys accepted in the TOML config file; all optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub waist: Option<f64>,
    pub tol: Option<f64>,
    pub lmax: Option<i32>,
    pub format: Option<Format>,
    pub arithmetic: Option<Arithmetic>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Values given on the command line; `None` means not given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagConfig {
    pub waist: Option<f64>,
    pub tol: Option<f64>,
    pub lmax: Option<i32>,
    pub format: Option<Format>,
    pub arithmetic: Option<Arithmetic>,
    pub out: Option<PathBuf>,
}

/// Where a command's table is written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// Fully resolved settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub waist: f64,
    pub tol: f64,
    pub lmax: Option<i32>,
    pub format: Format,
    pub arithmetic: Arithmetic,
    pub destination: Destination,
}

impl RunConfig {
    /// Merges the layers. `env_out_dir` is the value of [`OUT_DIR_ENV`], passed in so the
    /// resolution stays a pure function.
    pub fn resolve(flags: &FlagConfig, file: &FileConfig, env_out_dir: Option<PathBuf>, command: &str) -> Result<Self> {
        let waist = flags.waist.or(file.waist).unwrap_or(DEFAULT_WAIST);
        let tol = flags.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(waist > 0.0 && waist.is_finite()) {
            bail!("waist must be positive and finite, got {waist}");
        }
        if !(tol > 0.0 && tol.is_finite()) {
            bail!("tolerance must be positive and finite, got {tol}");
        }
        let format = flags.format.or(file.format).unwrap_or(Format::Csv);
        let destination = match (&flags.out, file.out_dir.clone().or(env_out_dir)) {
            (Some(path), _) => Destination::File(path.clone()),
            (None, Some(dir)) => Destination::File(dir.join(format!("{command}.{}", format.extension()))),
            (None, None) => Destination::Stdout,
        };
        Ok(Self {
            waist,
            tol,
            lmax: flags.lmax.or(file.lmax),
            format,
            arithmetic: flags.arithmetic.or(file.arithmetic).unwrap_or(Arithmetic::Auto),
            destination,
        })
    }
}
