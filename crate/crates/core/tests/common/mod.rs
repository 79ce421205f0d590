#![allow(dead_code)]

use gauss_quad::GaussLegendre;
use stimpdc::mode::ModeSpec;

/// Composite Gauss-Legendre on `[0, r_max]`: `pieces` panels of degree 40.
pub fn radial_oracle<F: Fn(f64) -> f64>(f: F, r_max: f64, pieces: usize) -> f64 {
    let rule = GaussLegendre::new(40).unwrap();
    let h = r_max / pieces as f64;
    (0..pieces).map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, &f)).sum()
}

/// `2 pi ∫ r R_a(r) R_b(r) R_c(r) dr` by the oracle, azimuthal charges assumed to cancel.
pub fn triple_oracle(a: &ModeSpec, b: &ModeSpec, c: &ModeSpec) -> f64 {
    let w = a.waist().max(b.waist()).max(c.waist());
    2.0 * std::f64::consts::PI * radial_oracle(|r| r * a.radial(r) * b.radial(r) * c.radial(r), 14.0 * w, 60)
}
