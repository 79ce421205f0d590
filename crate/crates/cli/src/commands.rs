//! The subcommands. Each builds a [`Table`] and counts failed checks.

use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use num_bigint::BigUint;
use num_complex::Complex64;
use stimpdc::cloning::{
    grid_report, scenario_grid, CloningScenario, StateFidelity, EXACT_STATE_BUDGET,
};
use stimpdc::fock::{apply_downconversion_power, Amplitude, Coupling, FockState, ModeLabel, ModeWindow};
use stimpdc::exact::Surd;
use stimpdc::mode::ModeSpec;
use stimpdc::overlap::{oam_spectrum, overlap, triple_overlap_quadrature, OverlapMethod, SpectrumBasis};
use stimpdc::spectrum::FlatteningStrategy;

use crate::config::{Arithmetic, RunConfig};
use crate::table::{format_float, Cell, Table};

/// Default `ell_max` when neither flag nor config file sets one.
pub const DEFAULT_LMAX: i32 = 5;

/// Closed form and quadrature must agree to this relative tolerance.
pub const DUAL_METHOD_TOLERANCE: f64 = 1e-8;

/// A command's table and the number of checks in it that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub failures: usize,
    /// Human-readable notes for stderr.
    pub notes: Vec<String>,
}

/// Pump mode written `gauss` or `lg:P:L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PumpArg {
    pub p: u32,
    pub ell: i32,
}

impl FromStr for PumpArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "gauss" {
            return Ok(Self { p: 0, ell: 0 });
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["lg", p, l] => Ok(Self {
                p: p.parse().map_err(|e| format!("radial index {p:?}: {e}"))?,
                ell: l.parse().map_err(|e| format!("charge {l:?}: {e}"))?,
            }),
            _ => Err(format!("expected `gauss` or `lg:P:L`, got {s:?}")),
        }
    }
}

impl PumpArg {
    fn mode(&self, waist: f64) -> Result<ModeSpec> {
        Ok(ModeSpec::lg(self.p, self.ell, waist)?)
    }
}

/// One pump superposition component written `P:L:RE` or `P:L:RE:IM`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentArg {
    pub p: u32,
    pub ell: i32,
    pub weight: Complex64,
}

impl FromStr for ComponentArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let (p, l, re, im) = match parts.as_slice() {
            [p, l, re] => (p, l, num(re)?, 0.0),
            [p, l, re, im] => (p, l, num(re)?, num(im)?),
            _ => return Err(format!("expected `P:L:RE` or `P:L:RE:IM`, got {s:?}")),
        };
        Ok(Self {
            p: p.parse().map_err(|e| format!("radial index {p:?}: {e}"))?,
            ell: l.parse().map_err(|e| format!("charge {l:?}: {e}"))?,
            weight: Complex64::new(re, im),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OverlapArgs {
    /// Pump mode: `gauss` or `lg:P:L`.
    #[arg(long, default_value = "gauss")]
    pub pump: PumpArg,
    /// Pump waist; defaults to the signal/idler waist.
    #[arg(long)]
    pub pump_waist: Option<f64>,
}

/// Coefficient table over signal charges `-lmax..=lmax`, idler conserving the pump charge.
pub fn cmd_overlap(args: &OverlapArgs, cfg: &RunConfig) -> Result<Outcome> {
    let lmax = cfg.lmax.unwrap_or(DEFAULT_LMAX);
    if lmax < 0 {
        bail!("--lmax must be >= 0, got {lmax}");
    }
    let pump = args.pump.mode(args.pump_waist.unwrap_or(cfg.waist))?;
    let mut table = Table::new(vec![
        "ell_signal",
        "ell_idler",
        "method",
        "value",
        "error",
        "closed_form",
        "quadrature",
        "status",
    ]);
    let mut failures = 0;
    let mut notes = Vec::new();
    for ls in -lmax..=lmax {
        let li = i32::try_from(pump.charge() - i64::from(ls)).context("idler charge out of range")?;
        let signal = ModeSpec::lg(0, ls, cfg.waist)?;
        let idler = ModeSpec::lg(0, li, cfg.waist)?;
        let mut row = vec![Cell::Int(ls.into()), Cell::Int(li.into())];
        let chosen = overlap(&pump, &signal, &idler, cfg.tol);
        let quad = triple_overlap_quadrature(&pump, &signal, &idler, cfg.tol);
        match (chosen, quad) {
            (Ok(c), Ok(q)) => {
                let closed = (c.method == OverlapMethod::ClosedForm).then_some(c.value.re);
                let status = match closed {
                    Some(cf) if (cf - q.value.re).abs() > DUAL_METHOD_TOLERANCE * cf.abs().max(f64::MIN_POSITIVE) => {
                        failures += 1;
                        notes.push(format!("ell {ls}: closed form {cf:e} vs quadrature {:e}", q.value.re));
                        "mismatch"
                    }
                    _ => "ok",
                };
                row.extend([
                    Cell::text(c.method.as_str()),
                    Cell::Float(c.value.re),
                    Cell::Float(q.error),
                    closed.map_or(Cell::Empty, Cell::Float),
                    Cell::Float(q.value.re),
                    Cell::text(status),
                ]);
            }
            (chosen, quad) => {
                failures += 1;
                let err = quad.err().or(chosen.err()).map(|e| e.to_string()).unwrap_or_default();
                notes.push(format!("ell {ls}: {err}"));
                row.extend([
                    Cell::text(OverlapMethod::Quadrature.as_str()),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::text(format!("quadrature-failed: {err}")),
                ]);
            }
        }
        table.push(row);
    }
    Ok(Outcome { table, failures, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Lg,
    Mlg,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value = "lg")]
    pub basis: BasisArg,
    /// Ring charge of the MLG basis.
    #[arg(long = "l", default_value_t = 1)]
    pub ring: i32,
    /// Pump mode: `gauss` or `lg:P:L`.
    #[arg(long, default_value = "gauss")]
    pub pump: PumpArg,
    /// Pump waist; defaults to the basis waist for LG and twice it for MLG.
    #[arg(long)]
    pub pump_waist: Option<f64>,
}

/// Pair weights `|N|^2` per signal charge, with the normalized column.
pub fn cmd_spectrum(args: &SpectrumArgs, cfg: &RunConfig) -> Result<Outcome> {
    let lmax = cfg.lmax.unwrap_or(DEFAULT_LMAX);
    let (basis, default_pump_waist) = match args.basis {
        BasisArg::Lg => (SpectrumBasis::Lg { waist: cfg.waist }, cfg.waist),
        BasisArg::Mlg => (SpectrumBasis::Mlg { ring: args.ring, waist: cfg.waist }, 2.0 * cfg.waist),
    };
    let pump = args.pump.mode(args.pump_waist.unwrap_or(default_pump_waist))?;
    let raw = oam_spectrum(&pump, basis, lmax, cfg.tol)?;
    let normalized = raw.normalize()?;
    let mut table = Table::new(vec!["ell_signal", "ell_idler", "weight", "normalized"]);
    for (r, n) in raw.rows.iter().zip(&normalized.rows) {
        table.push(vec![Cell::Int(r.ell_signal), Cell::Int(r.ell_idler), Cell::Float(r.weight), Cell::Float(n.weight)]);
    }
    Ok(Outcome { table, failures: 0, notes: Vec::new() })
}

#[derive(Debug, Clone, Args)]
pub struct CloneArgs {
    /// Initial copies N.
    #[arg(long, short = 'n', conflicts_with = "grid")]
    pub n: Option<u32>,
    /// Final copies M.
    #[arg(long, short = 'm', conflicts_with = "grid")]
    pub m: Option<u32>,
    /// Dimension d (even).
    #[arg(long, short = 'd', conflicts_with = "grid")]
    pub d: Option<u32>,
    /// Run every N <= n-max, N <= M <= m-max, d in dims.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, default_value_t = 4)]
    pub n_max: u32,
    #[arg(long, default_value_t = 8)]
    pub m_max: u32,
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8")]
    pub dims: Vec<u32>,
}

fn exact_budget(arithmetic: Arithmetic, needed: &BigUint) -> Result<u64> {
    let fits = *needed <= BigUint::from(EXACT_STATE_BUDGET);
    match arithmetic {
        Arithmetic::Auto => Ok(EXACT_STATE_BUDGET),
        Arithmetic::Float => Ok(0),
        Arithmetic::Exact if fits => Ok(EXACT_STATE_BUDGET),
        Arithmetic::Exact => bail!("{needed} pair distributions exceed the exact-arithmetic limit {EXACT_STATE_BUDGET}"),
    }
}

/// State-based, counting and closed-form fidelities with a verdict per scenario.
pub fn cmd_clone(args: &CloneArgs, cfg: &RunConfig) -> Result<Outcome> {
    let scenarios = if args.grid {
        scenario_grid(args.n_max, args.m_max, &args.dims)?
    } else {
        let (Some(n), Some(m), Some(d)) = (args.n, args.m, args.d) else {
            bail!("give --n, --m and --d, or --grid");
        };
        vec![CloningScenario::new(n, m, d)?]
    };
    let largest = scenarios.iter().map(|s| s.compositions()).max().unwrap_or_default();
    let budget = exact_budget(cfg.arithmetic, &largest)?;
    let report = grid_report(&scenarios, budget)?;
    let mut table = Table::new(vec!["N", "M", "d", "F_state", "F_counting", "F_formula", "verdict", "warning"]);
    let mut failures = 0;
    let mut notes = Vec::new();
    for r in &report {
        let s = r.scenario;
        if !r.verdict.passed() {
            failures += 1;
            notes.push(format!("mismatch at N={} M={} d={}", s.n_initial(), s.m_final(), s.dimension()));
        }
        let state = match &r.state {
            StateFidelity::Exact(f) => Cell::text(f.to_string()),
            StateFidelity::Float(x) => Cell::text(format_float(*x)),
        };
        let warning = match (&r.warning, cfg.arithmetic) {
            (Some(_), Arithmetic::Float) => Cell::text("float arithmetic requested"),
            (Some(w), _) => Cell::text(w.clone()),
            (None, _) => Cell::Empty,
        };
        table.push(vec![
            Cell::Int(s.n_initial().into()),
            Cell::Int(s.m_final().into()),
            Cell::Int(s.dimension().into()),
            state,
            Cell::text(r.counting.to_string()),
            Cell::text(r.formula.to_string()),
            Cell::text(r.verdict.as_str()),
            warning,
        ]);
    }
    Ok(Outcome { table, failures, notes })
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Seed photons in the target signal mode.
    #[arg(long, short = 'n', default_value_t = 1)]
    pub n: u32,
    /// Number of down-converted pairs.
    #[arg(long, short = 'q', default_value_t = 1)]
    pub q: u32,
    /// Dimension d of the mode window {±1, …, ±d/2}.
    #[arg(long, short = 'd', default_value_t = 2)]
    pub d: u32,
    /// Charge of the seeded signal mode.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub target: i32,
}

fn build_state<A: Amplitude>(args: &StateArgs) -> Result<FockState<A>> {
    let window = ModeWindow::from_dimension(args.d)?;
    let target = ModeLabel::signal(args.target);
    if !window.contains(target.ell) {
        bail!("target {target} lies outside the d = {} window", args.d);
    }
    let seed = FockState::number_state(target, args.n);
    Ok(apply_downconversion_power(&seed, i64::from(args.q), &Coupling::uniform(window))?)
}

/// Configuration/amplitude listing in configuration order.
pub fn cmd_state(args: &StateArgs, cfg: &RunConfig) -> Result<Outcome> {
    let d = u64::from(args.d);
    if d < 2 {
        bail!("dimension must be at least 2, got {d}");
    }
    let needed = stimpdc::special::binomial(u64::from(args.q) + d - 1, d - 1);
    let exact = match cfg.arithmetic {
        Arithmetic::Float => false,
        Arithmetic::Auto => needed <= BigUint::from(EXACT_STATE_BUDGET),
        Arithmetic::Exact => {
            exact_budget(Arithmetic::Exact, &needed)?;
            true
        }
    };
    let exact_state = if exact {
        match build_state::<Surd>(args) {
            Ok(s) => Some(s),
            Err(e) if matches!(e.downcast_ref(), Some(stimpdc::Error::ExactUnsupported(_))) => {
                if cfg.arithmetic == Arithmetic::Exact {
                    return Err(e);
                }
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (table, normalized) = match exact_state {
        Some(state) => {
            let mut table = Table::new(vec!["configuration", "amplitude"]);
            for (config, amp) in state.terms() {
                table.push(vec![Cell::text(config.to_string()), Cell::text(amp.to_string())]);
            }
            (table, state.is_normalized()?)
        }
        None => {
            let state = build_state::<Complex64>(args)?;
            let mut table = Table::new(vec!["configuration", "amplitude_re", "amplitude_im"]);
            for (config, amp) in state.terms() {
                table.push(vec![Cell::text(config.to_string()), Cell::Float(amp.re), Cell::Float(amp.im)]);
            }
            (table, state.is_normalized()?)
        }
    };
    let (failures, notes) = if normalized { (0, Vec::new()) } else { (1, vec!["state is not normalized".to_string()]) };
    Ok(Outcome { table, failures, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Mlg,
    Procrustean,
    Pump,
}

#[derive(Debug, Clone, Args)]
pub struct FlattenArgs {
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Ring charge for the MLG strategy.
    #[arg(long = "l", default_value_t = 1)]
    pub ring: i32,
    /// Pump component `P:L:RE[:IM]` for the pump strategy; repeat for a superposition.
    #[arg(long = "component", allow_hyphen_values = true)]
    pub components: Vec<ComponentArg>,
}

/// Flattened spectrum with its flatness and post-selection success probability.
pub fn cmd_flatten(args: &FlattenArgs, cfg: &RunConfig) -> Result<Outcome> {
    let lmax = cfg.lmax.unwrap_or(DEFAULT_LMAX);
    let strategy = match args.strategy {
        StrategyArg::Mlg => FlatteningStrategy::MlgBasis { ring: args.ring, waist: cfg.waist },
        StrategyArg::Procrustean => FlatteningStrategy::ProcrusteanFilter {
            ell_max: u32::try_from(lmax).map_err(|_| anyhow!("--lmax must be >= 1, got {lmax}"))?,
            waist: cfg.waist,
        },
        StrategyArg::Pump => {
            if args.components.is_empty() {
                bail!("the pump strategy needs at least one --component");
            }
            let pump = args
                .components
                .iter()
                .map(|c| Ok((ModeSpec::lg(c.p, c.ell, cfg.waist)?, c.weight)))
                .collect::<Result<Vec<_>>>()?;
            FlatteningStrategy::PumpShapingHook { pump, waist: cfg.waist }
        }
    };
    let outcome = strategy.run(lmax, cfg.tol)?;
    let mut table =
        Table::new(vec!["ell_signal", "ell_idler", "weight", "flatness", "success_probability"]);
    for r in &outcome.table.rows {
        table.push(vec![
            Cell::Int(r.ell_signal),
            Cell::Int(r.ell_idler),
            Cell::Float(r.weight),
            Cell::Float(outcome.flatness),
            Cell::Float(outcome.success_probability),
        ]);
    }
    let p = outcome.success_probability;
    let (failures, notes) = if p > 0.0 && p <= 1.0 {
        (0, Vec::new())
    } else {
        (1, vec![format!("success probability {p} outside (0, 1]")])
    };
    Ok(Outcome { table, failures, notes })
}
