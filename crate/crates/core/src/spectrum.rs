//! Strategies for flattening the OAM spectrum: MLG modes, Procrustean post-selection and
//! pump shaping.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode::ModeSpec;
use crate::overlap::{oam_spectrum, overlap, SpectrumBasis, SpectrumRow, SpectrumTable};

/// MLG cloning configurations are only accepted when both charges are non-negative or one
/// of them is zero.
pub fn check_mlg_charges(signal: i32, idler: i32) -> Result<()> {
    if (signal >= 0 && idler >= 0) || signal == 0 || idler == 0 {
        Ok(())
    } else {
        Err(Error::InvalidMode(format!(
            "MLG charges (signal {signal}, idler {idler}) must both be >= 0 or include a zero"
        )))
    }
}

/// Post-selects the `d = 2 ell_max` window `{±1, …, ±ell_max}` down to a flat spectrum.
///
/// Returns the flat, normalized table and the success probability
/// `d * min / Σ weights` over the window.
pub fn procrustean_filter(spectrum: &SpectrumTable, ell_max: u32) -> Result<(SpectrumTable, f64)> {
    if ell_max == 0 {
        return Err(Error::InvalidArgument("empty filter window".into()));
    }
    let mut window = Vec::new();
    for ell in (-(ell_max as i64)..=ell_max as i64).filter(|l| *l != 0) {
        let row = spectrum
            .rows
            .iter()
            .find(|r| r.ell_signal == ell)
            .ok_or_else(|| Error::OutsideWindow(format!("charge {ell} not in spectrum")))?;
        window.push(*row);
    }
    let total: f64 = window.iter().map(|r| r.weight).sum();
    let level = window.iter().map(|r| r.weight).fold(f64::INFINITY, f64::min);
    if !(total > 0.0) || !(level > 0.0) {
        return Err(Error::InvalidArgument("filter window has no weight".into()));
    }
    let d = window.len() as f64;
    let success = (d * level / total).min(1.0);
    let rows = window.iter().map(|r| SpectrumRow { weight: 1.0 / d, ..*r }).collect();
    Ok((SpectrumTable { rows, normalized: true }, success))
}

/// Ratio of the smallest to the largest weight; 1 for a flat spectrum.
pub fn flatness_metric(spectrum: &SpectrumTable) -> Result<f64> {
    if spectrum.rows.is_empty() {
        return Err(Error::InvalidArgument("flatness of an empty spectrum".into()));
    }
    let max = spectrum.rows.iter().map(|r| r.weight).fold(f64::NEG_INFINITY, f64::max);
    let min = spectrum.rows.iter().map(|r| r.weight).fold(f64::INFINITY, f64::min);
    if !(max > 0.0) {
        return Err(Error::InvalidArgument("flatness undefined for zero maximum weight".into()));
    }
    Ok(min / max)
}

/// `Σ_j w_j N(pump_j, signal, idler)`.
pub fn coherent_overlap(pump: &[(ModeSpec, Complex64)], signal: &ModeSpec, idler: &ModeSpec, tol: f64) -> Result<Complex64> {
    pump.iter().try_fold(Complex64::new(0.0, 0.0), |acc, (mode, w)| {
        Ok(acc + w * overlap(mode, signal, idler, tol)?.value)
    })
}

/// Spectrum of a pump superposition over single-ring LG signal/idler pairs with charges in
/// `[-ell_max, ell_max]`. Only pairs allowed by some pump component's charge appear.
pub fn pump_shaping_spectrum(
    pump: &[(ModeSpec, Complex64)],
    ell_max: i32,
    basis_waist: f64,
    tol: f64,
) -> Result<SpectrumTable> {
    if pump.is_empty() {
        return Err(Error::InvalidArgument("pump superposition is empty".into()));
    }
    if ell_max < 1 {
        return Err(Error::InvalidArgument(format!("ell_max must be at least 1, got {ell_max}")));
    }
    let norm: f64 = pump.iter().map(|(_, w)| w.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("pump weights must be normalized, got Σ|w|^2 = {norm}")));
    }
    let mut rows = Vec::new();
    for ls in -ell_max..=ell_max {
        for li in -ell_max..=ell_max {
            let sum = i64::from(ls) + i64::from(li);
            if !pump.iter().any(|(m, _)| m.charge() == sum) {
                continue;
            }
            let signal = ModeSpec::lg(0, ls, basis_waist)?;
            let idler = ModeSpec::lg(0, li, basis_waist)?;
            let amp = coherent_overlap(pump, &signal, &idler, tol)?;
            rows.push(SpectrumRow { ell_signal: i64::from(ls), ell_idler: i64::from(li), weight: amp.norm_sqr() });
        }
    }
    Ok(SpectrumTable { rows, normalized: false })
}

/// A two-component pump `cos(theta) a + sin(theta) b` tuned so two pair weights coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedPump {
    pub angle: f64,
    pub components: Vec<(ModeSpec, Complex64)>,
    pub weights: (f64, f64),
}

/// Bisection on the mixing angle within `bracket` so that the pair weights of `first` and
/// `second` (signal, idler charges) are equal. The bracket must straddle a sign change.
pub fn tune_two_component_pump(
    a: ModeSpec,
    b: ModeSpec,
    first: (i32, i32),
    second: (i32, i32),
    basis_waist: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<TunedPump> {
    let pairs = [first, second]
        .iter()
        .map(|(s, i)| Ok((ModeSpec::lg(0, *s, basis_waist)?, ModeSpec::lg(0, *i, basis_waist)?)))
        .collect::<Result<Vec<_>>>()?;
    // Each pair weight is |cos t A + sin t B|^2, so the per-component overlaps are computed once.
    let amps = pairs
        .iter()
        .map(|(s, i)| Ok((overlap(&a, s, i, tol)?.value, overlap(&b, s, i, tol)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let weights = |t: f64| -> (f64, f64) {
        let w = |(x, y): (Complex64, Complex64)| (x * t.cos() + y * t.sin()).norm_sqr();
        (w(amps[0]), w(amps[1]))
    };
    let gap = |t: f64| {
        let (p, q) = weights(t);
        p - q
    };
    let (mut lo, mut hi) = bracket;
    let (mut f_lo, f_hi) = (gap(lo), gap(hi));
    if f_lo == 0.0 {
        hi = lo;
    } else if f_hi == 0.0 {
        lo = hi;
    } else if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidArgument(format!(
            "bracket [{lo}, {hi}] does not straddle equal weights ({f_lo:e}, {f_hi:e})"
        )));
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        let f_mid = gap(mid);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let angle = 0.5 * (lo + hi);
    Ok(TunedPump {
        angle,
        components: vec![(a, Complex64::new(angle.cos(), 0.0)), (b, Complex64::new(angle.sin(), 0.0))],
        weights: weights(angle),
    })
}

/// Spectrum-flattening strategies.
#[derive(Debug, Clone, PartialEq)]
pub enum FlatteningStrategy {
    /// MLG signal/idler modes of a fixed ring charge, pumped by a Gaussian of waist `2 w0`.
    MlgBasis { ring: i32, waist: f64 },
    /// Post-selection of the Gaussian-pump LG spectrum down to the `{±1, …, ±ell_max}` window.
    ProcrusteanFilter { ell_max: u32, waist: f64 },
    /// Arbitrary pump superposition; only reports the resulting spectrum.
    PumpShapingHook { pump: Vec<(ModeSpec, Complex64)>, waist: f64 },
}

/// Spectrum produced by a strategy, its flatness and the post-selection success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningOutcome {
    pub table: SpectrumTable,
    pub flatness: f64,
    /// 1 unless the strategy discards events.
    pub success_probability: f64,
}

impl FlatteningStrategy {
    pub fn run(&self, ell_max: i32, tol: f64) -> Result<FlatteningOutcome> {
        let (table, success_probability) = match self {
            FlatteningStrategy::MlgBasis { ring, waist } => {
                check_mlg_charges(*ring, *ring)?;
                let pump = ModeSpec::gaussian(2.0 * waist)?;
                (oam_spectrum(&pump, SpectrumBasis::Mlg { ring: *ring, waist: *waist }, ell_max, tol)?, 1.0)
            }
            FlatteningStrategy::ProcrusteanFilter { ell_max: window, waist } => {
                let pump = ModeSpec::gaussian(*waist)?;
                let span = ell_max.max(*window as i32);
                let raw = oam_spectrum(&pump, SpectrumBasis::Lg { waist: *waist }, span, tol)?;
                procrustean_filter(&raw, *window)?
            }
            FlatteningStrategy::PumpShapingHook { pump, waist } => {
                (pump_shaping_spectrum(pump, ell_max, *waist, tol)?, 1.0)
            }
        };
        let flatness = flatness_metric(&table)?;
        Ok(FlatteningOutcome { table, flatness, success_probability })
    }
}
