//! Product-basis expansion coefficients of the thin-crystal mode function.
//!
//! The coefficient for pump `U`, signal `S` and idler `I` is the bare inner product
//! `∫ I*(rho) S*(rho) U(rho) d^2rho`; the `1/(2 pi)^2` Fourier prefactor is left to
//! the overall state normalization. The azimuthal integral is always resolved
//! analytically, so charge-mismatched triples are exactly zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mode::{azimuthal_integral, pointwise_conjugate_product, radial_cutoff, ModeFamily, ModeSpec, TransverseField};
use crate::quadrature::{integrate, QuadratureOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapMethod {
    Quadrature,
    ClosedForm,
    /// Projection of the product field `S* U` onto an idler mode.
    Projection,
}

impl OverlapMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            OverlapMethod::Quadrature => "quadrature",
            OverlapMethod::ClosedForm => "closed_form",
            OverlapMethod::Projection => "projection",
        }
    }
}

/// A coefficient `N^p_{k,m}` together with the modes and method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapCoefficient {
    pub value: Complex64,
    pub pump: ModeSpec,
    pub signal: ModeSpec,
    pub idler: ModeSpec,
    pub method: OverlapMethod,
    /// Estimated absolute error; zero for closed forms and selection-rule zeros.
    pub error: f64,
}

fn charges_cancel(pump: &ModeSpec, signal: &ModeSpec, idler: &ModeSpec) -> bool {
    idler.charge() + signal.charge() == pump.charge()
}

/// Triple overlap by analytic azimuthal integration and adaptive radial quadrature.
pub fn triple_overlap_quadrature(
    pump: &ModeSpec,
    signal: &ModeSpec,
    idler: &ModeSpec,
    tol: f64,
) -> Result<OverlapCoefficient> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut coefficient = OverlapCoefficient {
        value: Complex64::new(0.0, 0.0),
        pump: *pump,
        signal: *signal,
        idler: *idler,
        method: OverlapMethod::Quadrature,
        error: 0.0,
    };
    let net = pump.charge() - signal.charge() - idler.charge();
    let azimuth = azimuthal_integral(net);
    if azimuth == 0.0 {
        return Ok(coefficient);
    }
    let decay: f64 = [pump, signal, idler].iter().map(|m| m.waist().powi(-2)).sum();
    let degree: u32 = [pump, signal, idler]
        .iter()
        .map(|m| m.ell().unsigned_abs() + 2 * m.radial_index())
        .sum::<u32>()
        + 1;
    let cutoff = radial_cutoff(decay, degree);
    let integrand = |r: f64| r * idler.radial(r) * signal.radial(r) * pump.radial(r);
    let radial = integrate(integrand, 0.0, cutoff, QuadratureOptions::absolute(tol / azimuth)).map_err(|e| match e {
        Error::QuadratureDiverged { estimate, error, evaluations } => Error::QuadratureDiverged {
            estimate: estimate * azimuth,
            error: error * azimuth,
            evaluations,
        },
        other => other,
    })?;
    coefficient.value = Complex64::new(azimuth * radial.value, 0.0);
    coefficient.error = azimuth * radial.error;
    Ok(coefficient)
}

/// Gaussian pump, `p = 0` signal `+ell` and idler `-ell`, all with waist `w0`:
/// `(1/w0) sqrt(2/pi) (2/3)^{|ell|+1}`.
pub fn closed_form_lg_gaussian(ell: i32, w0: f64) -> Result<OverlapCoefficient> {
    let pump = ModeSpec::gaussian(w0)?;
    let signal = ModeSpec::lg(0, ell, w0)?;
    let idler = ModeSpec::lg(0, -ell, w0)?;
    let value = (2.0 / PI).sqrt() * (2.0f64 / 3.0).powi(ell.abs() + 1) / w0;
    Ok(OverlapCoefficient {
        value: Complex64::new(value, 0.0),
        pump,
        signal,
        idler,
        method: OverlapMethod::ClosedForm,
        error: 0.0,
    })
}

/// MLG signal and idler sharing ring charge `l` and waist `w0`, pumped by a Gaussian of
/// waist `2 w0`: `(2^{|l|}/w0) sqrt(2/pi) (4/9)^{|l|+1}`, independent of the windings.
pub fn closed_form_mlg_gaussian(l: i32, w0: f64) -> Result<OverlapCoefficient> {
    closed_form_mlg_windings(l, 1, -1, w0)
}

/// As [`closed_form_mlg_gaussian`] with explicit signal and idler windings; zero unless
/// the total charges `l * signal_winding + l * idler_winding` cancel.
pub fn closed_form_mlg_windings(l: i32, signal_winding: i32, idler_winding: i32, w0: f64) -> Result<OverlapCoefficient> {
    let pump = ModeSpec::gaussian(2.0 * w0)?;
    let signal = ModeSpec::mlg(l, signal_winding, w0)?;
    let idler = ModeSpec::mlg(l, idler_winding, w0)?;
    let value = if charges_cancel(&pump, &signal, &idler) {
        2f64.powi(l.abs()) / w0 * (2.0 / PI).sqrt() * (4.0f64 / 9.0).powi(l.abs() + 1)
    } else {
        0.0
    };
    Ok(OverlapCoefficient {
        value: Complex64::new(value, 0.0),
        pump,
        signal,
        idler,
        method: OverlapMethod::ClosedForm,
        error: 0.0,
    })
}

/// Which closed form, if any, covers this triple.
fn closed_form_for(pump: &ModeSpec, signal: &ModeSpec, idler: &ModeSpec) -> Option<Result<OverlapCoefficient>> {
    if !pump.is_gaussian() {
        return None;
    }
    let w = signal.waist();
    if idler.waist() != w {
        return None;
    }
    match (signal.family(), idler.family()) {
        (ModeFamily::Lg, ModeFamily::Lg)
            if pump.waist() == w && signal.radial_index() == 0 && idler.radial_index() == 0 =>
        {
            if !charges_cancel(pump, signal, idler) {
                return Some(Ok(zero_closed_form(pump, signal, idler)));
            }
            Some(closed_form_lg_gaussian(signal.ell(), w))
        }
        (ModeFamily::Mlg { winding: ns }, ModeFamily::Mlg { winding: ni })
            if pump.waist() == 2.0 * w && signal.ell() == idler.ell() =>
        {
            Some(closed_form_mlg_windings(signal.ell(), ns, ni, w))
        }
        _ => None,
    }
}

fn zero_closed_form(pump: &ModeSpec, signal: &ModeSpec, idler: &ModeSpec) -> OverlapCoefficient {
    OverlapCoefficient {
        value: Complex64::new(0.0, 0.0),
        pump: *pump,
        signal: *signal,
        idler: *idler,
        method: OverlapMethod::ClosedForm,
        error: 0.0,
    }
}

/// Coefficient by closed form when one applies, otherwise by quadrature.
pub fn overlap(pump: &ModeSpec, signal: &ModeSpec, idler: &ModeSpec, tol: f64) -> Result<OverlapCoefficient> {
    match closed_form_for(pump, signal, idler) {
        Some(result) => result,
        None => triple_overlap_quadrature(pump, signal, idler, tol),
    }
}

/// Projects the product field `S* U` onto each idler basis mode: `<I_k | S* U>`.
///
/// This route integrates the azimuth numerically on the composed field, so it is an
/// independent check of [`triple_overlap_quadrature`].
pub fn decompose_product_rule(
    signal: &ModeSpec,
    pump: &ModeSpec,
    idler_basis: &[ModeSpec],
    tol: f64,
) -> Result<Vec<OverlapCoefficient>> {
    let product = pointwise_conjugate_product(&TransverseField::from_mode(*signal), &TransverseField::from_mode(*pump));
    idler_basis
        .par_iter()
        .map(|idler| {
            let (value, error) = TransverseField::inner_product(&TransverseField::from_mode(*idler), &product, tol)?;
            Ok(OverlapCoefficient {
                value,
                pump: *pump,
                signal: *signal,
                idler: *idler,
                method: OverlapMethod::Projection,
                error,
            })
        })
        .collect()
}

/// Evaluates many triples in parallel; the result order matches the input order.
pub fn overlap_batch(triples: &[(ModeSpec, ModeSpec, ModeSpec)], tol: f64, force_quadrature: bool) -> Vec<Result<OverlapCoefficient>> {
    triples
        .par_iter()
        .map(|(p, s, i)| {
            if force_quadrature {
                triple_overlap_quadrature(p, s, i, tol)
            } else {
                overlap(p, s, i, tol)
            }
        })
        .collect()
}

/// One row of an OAM spectrum: the pair probability weight for signal and idler charges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub ell_signal: i64,
    pub ell_idler: i64,
    pub weight: f64,
}

/// Per-pair probability weights, raw or normalized over the table's window.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    pub normalized: bool,
}

impl SpectrumTable {
    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.weight).sum()
    }

    /// Rescales the weights to sum to one.
    pub fn normalize(&self) -> Result<SpectrumTable> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("cannot normalize a spectrum with zero total weight".into()));
        }
        Ok(SpectrumTable {
            rows: self.rows.iter().map(|r| SpectrumRow { weight: r.weight / total, ..*r }).collect(),
            normalized: true,
        })
    }

    pub fn weight(&self, ell_signal: i64) -> Option<f64> {
        self.rows.iter().find(|r| r.ell_signal == ell_signal).map(|r| r.weight)
    }
}

/// Signal/idler basis used to tabulate a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumBasis {
    /// Single-ring LG modes of the given waist.
    Lg { waist: f64 },
    /// MLG modes with a fixed ring charge; rows run over the windings.
    Mlg { ring: i32, waist: f64 },
}

/// Signal and idler modes for the row with signal index `index` in `basis`.
pub(crate) fn basis_pair(pump: &ModeSpec, basis: SpectrumBasis, index: i32) -> Result<(ModeSpec, ModeSpec)> {
    match basis {
        SpectrumBasis::Lg { waist } => {
            let idler_charge = i32::try_from(pump.charge() - i64::from(index))
                .map_err(|_| Error::InvalidArgument("idler charge out of range".into()))?;
            Ok((ModeSpec::lg(0, index, waist)?, ModeSpec::lg(0, idler_charge, waist)?))
        }
        SpectrumBasis::Mlg { ring, waist } => {
            if ring == 0 {
                return Err(Error::InvalidMode("MLG ring charge must be non-zero".into()));
            }
            let signal = ModeSpec::mlg(ring, index, waist)?;
            let rest = pump.charge() - signal.charge();
            if rest % i64::from(ring) != 0 {
                return Err(Error::InvalidMode(format!(
                    "pump charge {} cannot be balanced by MLG windings of ring {ring}",
                    pump.charge()
                )));
            }
            let idler_winding = i32::try_from(rest / i64::from(ring))
                .map_err(|_| Error::InvalidArgument("idler winding out of range".into()))?;
            Ok((signal, ModeSpec::mlg(ring, idler_winding, waist)?))
        }
    }
}

/// OAM spectrum `P = |N|^2` over signal indices `-ell_max..=ell_max`, the idler taking the
/// charge that conserves the pump's. Closed forms are used where they apply.
pub fn oam_spectrum(pump: &ModeSpec, basis: SpectrumBasis, ell_max: i32, tol: f64) -> Result<SpectrumTable> {
    if ell_max < 1 {
        return Err(Error::InvalidArgument(format!("ell_max must be at least 1, got {ell_max}")));
    }
    if let SpectrumBasis::Mlg { ring, .. } = basis {
        crate::spectrum::check_mlg_charges(ring, ring)?;
    }
    let rows = (-ell_max..=ell_max)
        .into_par_iter()
        .map(|index| {
            let (signal, idler) = basis_pair(pump, basis, index)?;
            let c = overlap(pump, &signal, &idler, tol)?;
            Ok(SpectrumRow { ell_signal: signal.charge(), ell_idler: idler.charge(), weight: c.value.norm_sqr() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable { rows, normalized: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lg(ell: i32, w: f64) -> ModeSpec {
        ModeSpec::lg(0, ell, w).unwrap()
    }

    #[test]
    fn mismatched_charges_are_exact_zero() {
        let g = ModeSpec::gaussian(1.0).unwrap();
        let c = triple_overlap_quadrature(&g, &lg(1, 1.0), &lg(1, 1.0), 1e-12).unwrap();
        assert_eq!(c.value, Complex64::new(0.0, 0.0));
        assert_eq!(c.error, 0.0);
        let c = overlap(&g, &lg(2, 1.0), &lg(-1, 1.0), 1e-12).unwrap();
        assert_eq!(c.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unit_charge_closed_form() {
        let c = closed_form_lg_gaussian(1, 1.0).unwrap();
        assert!((c.value.re - (2.0 / PI).sqrt() * 4.0 / 9.0).abs() < 1e-16);
        let c3 = closed_form_lg_gaussian(3, 2.0).unwrap();
        assert!((c3.value.re - 0.5 * (2.0 / PI).sqrt() * (2.0f64 / 3.0).powi(4)).abs() < 1e-16);
    }

    #[test]
    fn dispatch_uses_closed_form_only_when_it_applies() {
        let g = ModeSpec::gaussian(1.0).unwrap();
        assert_eq!(overlap(&g, &lg(2, 1.0), &lg(-2, 1.0), 1e-12).unwrap().method, OverlapMethod::ClosedForm);
        assert_eq!(overlap(&g, &lg(2, 1.5), &lg(-2, 1.5), 1e-12).unwrap().method, OverlapMethod::Quadrature);
        let p1 = ModeSpec::lg(1, 0, 1.0).unwrap();
        assert_eq!(overlap(&p1, &lg(1, 1.0), &lg(-1, 1.0), 1e-12).unwrap().method, OverlapMethod::Quadrature);
    }

    #[test]
    fn mlg_closed_form_ignores_windings() {
        let a = closed_form_mlg_windings(1, 2, -2, 1.0).unwrap();
        let b = closed_form_mlg_windings(1, 7, -7, 1.0).unwrap();
        assert_eq!(a.value, b.value);
        assert!((a.value.re - 2.0 * (2.0 / PI).sqrt() * (4.0f64 / 9.0).powi(2)).abs() < 1e-16);
        assert_eq!(closed_form_mlg_windings(1, 2, 3, 1.0).unwrap().value.re, 0.0);
    }

    #[test]
    fn spectrum_rejects_empty_window() {
        let g = ModeSpec::gaussian(1.0).unwrap();
        assert!(oam_spectrum(&g, SpectrumBasis::Lg { waist: 1.0 }, 0, 1e-12).is_err());
    }

    #[test]
    fn bad_tolerance_rejected() {
        let g = ModeSpec::gaussian(1.0).unwrap();
        assert!(triple_overlap_quadrature(&g, &lg(1, 1.0), &lg(-1, 1.0), 0.0).is_err());
    }
}
