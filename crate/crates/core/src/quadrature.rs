//! Globally adaptive Gauss-Kronrod (7/15) integration on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target; the looser of the two wins.
    pub rel_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
    /// Number of equal pieces the domain is cut into before adapting.
    pub initial_pieces: usize,
}

impl QuadratureOptions {
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            max_intervals: 4000,
            initial_pieces: 8,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    // Raw Kronrod-Gauss difference; pessimistic for smooth integrands.
    let err = ((kron - gauss) * half).abs();
    (value, err.max(50.0 * f64::EPSILON * value.abs()))
}

/// Integrates `f` over `[a, b]` until the summed error estimate meets the tolerance.
///
/// On failure the error carries the best estimate reached and its error bound.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<Integral> {
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let pieces = opts.initial_pieces.max(1);
    let step = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for i in 0..pieces {
        let lo = a + step * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + step };
        let (value, error) = kronrod(&f, lo, hi);
        evaluations += 15;
        heap.push(Piece { a: lo, b: hi, value, error });
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if error <= target {
            return Ok(Integral { value: total, error, evaluations });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureDiverged { estimate: total, error, evaluations });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureDiverged { estimate: total, error, evaluations });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(&f, lo, hi);
            evaluations += 15;
            heap.push(Piece { a: lo, b: hi, value, error });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, QuadratureOptions::absolute(1e-13)).unwrap();
        assert!((r.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_moment() {
        // int_0^inf r^3 e^{-3 r^2} dr = 1 / 18
        let r = integrate(|x| x.powi(3) * (-3.0 * x * x).exp(), 0.0, 8.0, QuadratureOptions::absolute(1e-14))
            .unwrap();
        assert!((r.value - 1.0 / 18.0).abs() < 1e-14);
    }

    #[test]
    fn reports_divergence_with_estimate() {
        let opts = QuadratureOptions { abs_tol: 1e-14, rel_tol: 0.0, max_intervals: 3, initial_pieces: 1 };
        let err = integrate(|x: f64| (1.0 / x.max(1e-300)).sin() * 1e3, 0.0, 1.0, opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureDiverged { .. }));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let opts = QuadratureOptions { abs_tol: 0.0, ..QuadratureOptions::absolute(1.0) };
        assert!(integrate(|x| x, 0.0, 1.0, opts).is_err());
    }
}
