//! Transverse spatial modes on the crystal front plane (z = 0).
//!
//! Laguerre-Gauss modes use the normalization
//!
//! ```text
//! LG_{p,l}(r, phi) = sqrt(2^{|l|+1} p! / (pi (p+|l|)! w0^2)) exp(-r^2/w0^2) (r/w0)^{|l|}
//!                    L_p^{|l|}(2 r^2 / w0^2) exp(i l phi)
//! ```
//!
//! and modified Laguerre-Gauss (MLG) modes keep the single-ring intensity of
//! `LG_{0,l}` while winding the phase `l * N` times.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::special::{assoc_laguerre, factorial_ratio};

/// Mode family of a [`ModeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeFamily {
    Lg,
    /// Modified LG mode; [`ModeSpec::ell`] is the ring charge `l` and `winding` is `N`.
    Mlg { winding: i32 },
}

/// A transverse mode label: family, radial index, azimuthal charge and waist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    family: ModeFamily,
    p: u32,
    ell: i32,
    waist: f64,
}

impl ModeSpec {
    pub fn new(family: ModeFamily, p: u32, ell: i32, waist: f64) -> Result<Self> {
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::InvalidMode(format!("waist must be positive and finite, got {waist}")));
        }
        if matches!(family, ModeFamily::Mlg { .. }) && p != 0 {
            return Err(Error::InvalidMode(format!("MLG modes are single-ring (p = 0), got p = {p}")));
        }
        Ok(Self { family, p, ell, waist })
    }

    /// Like [`ModeSpec::new`] but accepts a signed radial index, as read from user input.
    pub fn from_signed(family: ModeFamily, p: i64, ell: i32, waist: f64) -> Result<Self> {
        let p = u32::try_from(p).map_err(|_| Error::InvalidMode(format!("radial index must be >= 0, got {p}")))?;
        Self::new(family, p, ell, waist)
    }

    pub fn lg(p: u32, ell: i32, waist: f64) -> Result<Self> {
        Self::new(ModeFamily::Lg, p, ell, waist)
    }

    /// The fundamental Gaussian `LG_{0,0}`.
    pub fn gaussian(waist: f64) -> Result<Self> {
        Self::lg(0, 0, waist)
    }

    pub fn mlg(ring: i32, winding: i32, waist: f64) -> Result<Self> {
        Self::new(ModeFamily::Mlg { winding }, 0, ring, waist)
    }

    pub fn family(&self) -> ModeFamily {
        self.family
    }

    pub fn radial_index(&self) -> u32 {
        self.p
    }

    /// For LG the azimuthal charge, for MLG the ring charge `l`.
    pub fn ell(&self) -> i32 {
        self.ell
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    /// Total azimuthal charge (`l * N` for MLG modes).
    pub fn charge(&self) -> i64 {
        match self.family {
            ModeFamily::Lg => i64::from(self.ell),
            ModeFamily::Mlg { winding } => i64::from(self.ell) * i64::from(winding),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        self.family == ModeFamily::Lg && self.p == 0 && self.ell == 0
    }

    /// The complex-conjugate mode: same radial profile, opposite charge.
    pub fn conjugate(&self) -> Self {
        match self.family {
            ModeFamily::Lg => Self { ell: -self.ell, ..*self },
            ModeFamily::Mlg { winding } => Self { family: ModeFamily::Mlg { winding: -winding }, ..*self },
        }
    }

    /// Real radial profile `R(r)` such that the mode equals `R(r) exp(i charge phi)`.
    pub fn radial(&self, r: f64) -> f64 {
        let abs_l = self.ell.unsigned_abs();
        let w = self.waist;
        let norm = (2f64.powi(abs_l as i32 + 1) * factorial_ratio(self.p, abs_l) / (PI * w * w)).sqrt();
        let rho = r / w;
        let value = norm
            * (-rho * rho).exp()
            * rho.powi(abs_l as i32)
            * assoc_laguerre(self.p, f64::from(abs_l), 2.0 * rho * rho);
        match self.family {
            ModeFamily::Lg => value,
            ModeFamily::Mlg { .. } => value.abs(),
        }
    }

    pub fn evaluate(&self, r: f64, phi: f64) -> Result<Complex64> {
        match self.family {
            ModeFamily::Lg => evaluate_lg(self, r, phi),
            ModeFamily::Mlg { .. } => evaluate_mlg(self, r, phi),
        }
    }

    /// Decay rate `a` and polynomial degree `k` of an envelope `r^k exp(-a r^2)` bounding the mode.
    fn envelope(&self) -> (f64, u32) {
        (1.0 / (self.waist * self.waist), self.ell.unsigned_abs() + 2 * self.p)
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            ModeFamily::Lg => write!(f, "LG(p={}, l={:+}, w0={})", self.p, self.ell, self.waist),
            ModeFamily::Mlg { winding } => {
                write!(f, "MLG(l={:+}, N={:+}, w0={})", self.ell, winding, self.waist)
            }
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    Ok(())
}

/// Evaluates an LG mode at polar coordinates `(r, phi)`.
pub fn evaluate_lg(spec: &ModeSpec, r: f64, phi: f64) -> Result<Complex64> {
    if spec.family != ModeFamily::Lg {
        return Err(Error::InvalidMode(format!("{spec} is not an LG mode")));
    }
    check_radius(r)?;
    Ok(Complex64::from_polar(1.0, f64::from(spec.ell) * phi) * spec.radial(r))
}

/// Evaluates an MLG mode: `|LG_{0,l}(r)| exp(i l N phi)`.
pub fn evaluate_mlg(spec: &ModeSpec, r: f64, phi: f64) -> Result<Complex64> {
    if !matches!(spec.family, ModeFamily::Mlg { .. }) {
        return Err(Error::InvalidMode(format!("{spec} is not an MLG mode")));
    }
    if spec.p != 0 {
        return Err(Error::InvalidMode(format!("MLG modes are single-ring (p = 0), got p = {}", spec.p)));
    }
    check_radius(r)?;
    Ok(Complex64::from_polar(1.0, spec.charge() as f64 * phi) * spec.radial(r))
}

/// Azimuthal integral of `exp(i m phi)` over one turn: `2 pi` if `m == 0`, exactly zero otherwise.
pub fn azimuthal_integral(net_charge: i64) -> f64 {
    if net_charge == 0 {
        2.0 * PI
    } else {
        0.0
    }
}

type FieldFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// An evaluable complex field on the plane, with the modes it was built from.
#[derive(Clone)]
pub struct TransverseField {
    eval: Arc<FieldFn>,
    sources: Vec<ModeSpec>,
    charge: Option<i64>,
    decay: f64,
    degree: u32,
}

impl fmt::Debug for TransverseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransverseField")
            .field("sources", &self.sources)
            .field("charge", &self.charge)
            .finish_non_exhaustive()
    }
}

impl TransverseField {
    pub fn from_mode(spec: ModeSpec) -> Self {
        let (decay, degree) = spec.envelope();
        let charge = spec.charge() as f64;
        Self {
            eval: Arc::new(move |r, phi| Complex64::from_polar(1.0, charge * phi) * spec.radial(r)),
            sources: vec![spec],
            charge: Some(spec.charge()),
            decay,
            degree,
        }
    }

    /// Wraps an arbitrary field. `decay` and `degree` describe an envelope
    /// `r^degree exp(-decay r^2)` used to truncate radial integrals.
    pub fn from_fn<F>(f: F, decay: f64, degree: u32) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::InvalidArgument(format!("field decay rate must be positive, got {decay}")));
        }
        Ok(Self { eval: Arc::new(f), sources: Vec::new(), charge: None, decay, degree })
    }

    pub fn evaluate(&self, r: f64, phi: f64) -> Result<Complex64> {
        check_radius(r)?;
        Ok((self.eval)(r, phi))
    }

    pub fn sources(&self) -> &[ModeSpec] {
        &self.sources
    }

    /// Net azimuthal charge when the field is a single vortex `R(r) exp(i m phi)`.
    pub fn charge(&self) -> Option<i64> {
        self.charge
    }

    pub fn conjugate(&self) -> Self {
        let inner = Arc::clone(&self.eval);
        Self {
            eval: Arc::new(move |r, phi| inner(r, phi).conj()),
            sources: self.sources.clone(),
            charge: self.charge.map(|m| -m),
            decay: self.decay,
            degree: self.degree,
        }
    }

    /// Outer radius beyond which `r |f|` is below `1e-16` of its envelope peak.
    pub fn radial_cutoff(&self) -> f64 {
        radial_cutoff(self.decay, self.degree + 1)
    }

    /// `<a|b> = ∫ a* b d^2rho`, with the azimuth sampled on a uniform grid and adaptive radial quadrature.
    pub fn inner_product(a: &Self, b: &Self, tol: f64) -> Result<(Complex64, f64)> {
        let product = pointwise_conjugate_product(a, b);
        product.integrate(tol)
    }

    /// Integral of the field over the plane and the quadrature error estimate.
    pub fn integrate(&self, tol: f64) -> Result<(Complex64, f64)> {
        const AZIMUTH_SAMPLES: usize = 128;
        let dphi = 2.0 * PI / AZIMUTH_SAMPLES as f64;
        let ring = |r: f64| -> Complex64 {
            let sum: Complex64 = (0..AZIMUTH_SAMPLES).map(|j| (self.eval)(r, j as f64 * dphi)).sum();
            sum * dphi * r
        };
        let cutoff = self.radial_cutoff();
        let opts = QuadratureOptions::absolute(tol / 2.0);
        let re = integrate(|r| ring(r).re, 0.0, cutoff, opts)?;
        let im = integrate(|r| ring(r).im, 0.0, cutoff, opts)?;
        Ok((Complex64::new(re.value, im.value), re.error + im.error))
    }
}

/// The field `rho -> a*(rho) b(rho)`, unnormalized.
pub fn pointwise_conjugate_product(a: &TransverseField, b: &TransverseField) -> TransverseField {
    let (fa, fb) = (Arc::clone(&a.eval), Arc::clone(&b.eval));
    let mut sources = a.sources.clone();
    sources.extend_from_slice(&b.sources);
    TransverseField {
        eval: Arc::new(move |r, phi| fa(r, phi).conj() * fb(r, phi)),
        sources,
        charge: a.charge.zip(b.charge).map(|(ca, cb)| cb - ca),
        decay: a.decay + b.decay,
        degree: a.degree + b.degree,
    }
}

/// Smallest `R` with `R^degree exp(-decay R^2) <= 1e-16 * max_r r^degree exp(-decay r^2)`.
pub(crate) fn radial_cutoff(decay: f64, degree: u32) -> f64 {
    let k = f64::from(degree);
    let log_env = |r: f64| if k == 0.0 { -decay * r * r } else { k * r.ln() - decay * r * r };
    let peak = if k == 0.0 { 0.0 } else { log_env((k / (2.0 * decay)).sqrt()) };
    let threshold = peak + 1e-16f64.ln();
    let mut r = ((k / (2.0 * decay)).sqrt()).max(1.0 / decay.sqrt());
    while log_env(r) > threshold {
        r *= 1.05;
    }
    r
}
