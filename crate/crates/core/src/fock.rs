//! Multimode bosonic occupation states over signal and idler OAM modes.
//!
//! States are sparse maps from occupation configurations to amplitudes. The amplitude
//! type decides the arithmetic: [`Surd`] keeps every amplitude exact (rationals times
//! square roots), `Complex64` is the floating-point fallback.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul};

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::Surd;
use crate::special::factorial;

/// Arithmetic used for state amplitudes.
pub trait Amplitude: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    /// Squared magnitudes and expectation values.
    type Weight: Clone
        + fmt::Debug
        + fmt::Display
        + PartialEq
        + PartialOrd
        + Zero
        + One
        + Add<Output = Self::Weight>
        + Mul<Output = Self::Weight>
        + Div<Output = Self::Weight>
        + Send
        + Sync;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn sqrt_int(n: u64) -> Result<Self>;
    fn inverse_integer(n: &BigUint) -> Result<Self>;
    fn norm_sqr(&self) -> Result<Self::Weight>;
    /// `1 / sqrt(w)` as an amplitude.
    fn inverse_sqrt(w: &Self::Weight) -> Result<Self>;
    fn weight_from_u64(n: u64) -> Self::Weight;
    /// Whether a total probability counts as one: exactly, or within `1e-12`.
    fn is_unit(w: &Self::Weight) -> bool;
    fn weight_to_f64(w: &Self::Weight) -> f64;
    fn to_complex(&self) -> Complex64;
}

impl Amplitude for Surd {
    type Weight = BigRational;

    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::from_integer(1)
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(Surd::add(self, other))
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Surd::mul(self, other)
    }
    fn sqrt_int(n: u64) -> Result<Self> {
        Surd::sqrt_of(u128::from(n))
    }
    fn inverse_integer(n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        Ok(Surd::from_rational(BigRational::new(BigInt::one(), BigInt::from(n.clone()))))
    }
    fn norm_sqr(&self) -> Result<BigRational> {
        self.square()
    }
    fn inverse_sqrt(w: &BigRational) -> Result<Self> {
        if w.is_zero() {
            return Err(Error::NotNormalized("0".into()));
        }
        Surd::sqrt_of_rational(&w.recip())
    }
    fn weight_from_u64(n: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_unit(w: &BigRational) -> bool {
        w.is_one()
    }
    fn weight_to_f64(w: &BigRational) -> f64 {
        w.to_f64().unwrap_or(f64::NAN)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
}

impl Amplitude for Complex64 {
    type Weight = f64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn sqrt_int(n: u64) -> Result<Self> {
        Ok(Complex64::new((n as f64).sqrt(), 0.0))
    }
    fn inverse_integer(n: &BigUint) -> Result<Self> {
        let v = n.to_f64().unwrap_or(f64::INFINITY);
        if v == 0.0 {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        Ok(Complex64::new(1.0 / v, 0.0))
    }
    fn norm_sqr(&self) -> Result<f64> {
        Ok(Complex64::norm_sqr(self))
    }
    fn inverse_sqrt(w: &f64) -> Result<Self> {
        if !(*w > 0.0) {
            return Err(Error::NotNormalized(w.to_string()));
        }
        Ok(Complex64::new(1.0 / w.sqrt(), 0.0))
    }
    fn weight_from_u64(n: u64) -> f64 {
        n as f64
    }
    fn is_unit(w: &f64) -> bool {
        (w - 1.0).abs() <= 1e-12
    }
    fn weight_to_f64(w: &f64) -> f64 {
        *w
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Beam {
    Signal,
    Idler,
}

/// A signal or idler mode with a given azimuthal charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub beam: Beam,
    pub ell: i32,
}

impl ModeLabel {
    pub fn signal(ell: i32) -> Self {
        Self { beam: Beam::Signal, ell }
    }

    pub fn idler(ell: i32) -> Self {
        Self { beam: Beam::Idler, ell }
    }

    /// Same beam, opposite charge.
    pub fn conjugate(&self) -> Self {
        Self { ell: -self.ell, ..*self }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let beam = match self.beam {
            Beam::Signal => 's',
            Beam::Idler => 'i',
        };
        write!(f, "{beam}({:+})", self.ell)
    }
}

/// The `d = 2 ell_max` mode set `{±1, …, ±ell_max}`; `ell = 0` is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeWindow {
    ell_max: u32,
}

impl ModeWindow {
    pub fn new(ell_max: u32) -> Result<Self> {
        if ell_max == 0 {
            return Err(Error::InvalidArgument("mode window needs ell_max >= 1".into()));
        }
        Ok(Self { ell_max })
    }

    pub fn from_dimension(d: u32) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return Err(Error::InvalidArgument(format!("dimension must be even and >= 2, got {d}")));
        }
        Self::new(d / 2)
    }

    pub fn ell_max(&self) -> u32 {
        self.ell_max
    }

    pub fn dimension(&self) -> u32 {
        2 * self.ell_max
    }

    pub fn contains(&self, ell: i32) -> bool {
        ell != 0 && ell.unsigned_abs() <= self.ell_max
    }

    /// Charges in ascending order.
    pub fn charges(&self) -> impl Iterator<Item = i32> {
        let m = self.ell_max as i32;
        (-m..=m).filter(|&l| l != 0)
    }
}

/// Photon numbers per mode; unoccupied modes are omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration(BTreeMap<ModeLabel, u32>);

impl Configuration {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn from_occupations<I: IntoIterator<Item = (ModeLabel, u32)>>(occupations: I) -> Self {
        let mut map = BTreeMap::new();
        for (mode, n) in occupations {
            if n > 0 {
                *map.entry(mode).or_insert(0) += n;
            }
        }
        Self(map)
    }

    pub fn occupation(&self, mode: &ModeLabel) -> u32 {
        self.0.get(mode).copied().unwrap_or(0)
    }

    pub fn occupations(&self) -> impl Iterator<Item = (&ModeLabel, &u32)> {
        self.0.iter()
    }

    pub fn total(&self, beam: Beam) -> u32 {
        self.0.iter().filter(|(m, _)| m.beam == beam).map(|(_, n)| n).sum()
    }

    /// The part of the configuration living in one beam.
    pub fn restrict(&self, beam: Beam) -> Configuration {
        Self(self.0.iter().filter(|(m, _)| m.beam == beam).map(|(m, n)| (*m, *n)).collect())
    }

    fn with_added(&self, mode: ModeLabel) -> (Configuration, u32) {
        let mut next = self.0.clone();
        let n = next.entry(mode).or_insert(0);
        let before = *n;
        *n += 1;
        (Self(next), before)
    }

    fn with_removed(&self, mode: ModeLabel) -> Option<(Configuration, u32)> {
        let before = self.occupation(&mode);
        if before == 0 {
            return None;
        }
        let mut next = self.0.clone();
        if before == 1 {
            next.remove(&mode);
        } else {
            next.insert(mode, before - 1);
        }
        Some((Self(next), before))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "vac");
        }
        for (i, (mode, n)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{mode}={n}")?;
        }
        Ok(())
    }
}

/// A superposition of occupation configurations. Zero amplitudes are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState<A: Amplitude> {
    terms: BTreeMap<Configuration, A>,
}

pub type ExactState = FockState<Surd>;
pub type FloatState = FockState<Complex64>;

impl<A: Amplitude> FockState<A> {
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Configuration::vacuum(), A::one());
        Self { terms }
    }

    /// `|n⟩` in a single mode, vacuum elsewhere.
    pub fn number_state(mode: ModeLabel, n: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Configuration::from_occupations([(mode, n)]), A::one());
        Self { terms }
    }

    /// Builds a state, merging repeated configurations and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Configuration, A)>>(terms: I) -> Result<Self> {
        let mut state = Self { terms: BTreeMap::new() };
        for (config, amp) in terms {
            state.accumulate(config, amp)?;
        }
        Ok(state)
    }

    fn accumulate(&mut self, config: Configuration, amp: A) -> Result<()> {
        if amp.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&config) {
            Some(existing) => {
                let sum = existing.add(&amp)?;
                if !sum.is_zero() {
                    self.terms.insert(config, sum);
                }
            }
            None => {
                self.terms.insert(config, amp);
            }
        }
        Ok(())
    }

    /// Terms in lexicographic configuration order.
    pub fn terms(&self) -> impl Iterator<Item = (&Configuration, &A)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, config: &Configuration) -> Option<&A> {
        self.terms.get(config)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeLabel> + '_ {
        let mut seen: Vec<ModeLabel> = self.terms.keys().flat_map(|c| c.0.keys().copied()).collect();
        seen.sort();
        seen.dedup();
        seen.into_iter()
    }

    /// `a†` applied termwise with the `sqrt(n + 1)` factor; not renormalized.
    pub fn create(&self, mode: ModeLabel) -> Result<Self> {
        let mut out = Self { terms: BTreeMap::new() };
        for (config, amp) in &self.terms {
            let (next, before) = config.with_added(mode);
            out.accumulate(next, amp.mul(&A::sqrt_int(u64::from(before) + 1)?)?)?;
        }
        Ok(out)
    }

    /// `a` applied termwise with the `sqrt(n)` factor; not renormalized.
    pub fn annihilate(&self, mode: ModeLabel) -> Result<Self> {
        let mut out = Self { terms: BTreeMap::new() };
        for (config, amp) in &self.terms {
            if let Some((next, before)) = config.with_removed(mode) {
                out.accumulate(next, amp.mul(&A::sqrt_int(u64::from(before))?)?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &A) -> Result<Self> {
        let mut out = Self { terms: BTreeMap::new() };
        for (config, amp) in &self.terms {
            out.accumulate(config.clone(), amp.mul(factor)?)?;
        }
        Ok(out)
    }

    pub fn superpose(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (config, amp) in &other.terms {
            out.accumulate(config.clone(), amp.clone())?;
        }
        Ok(out)
    }

    /// Keeps the terms whose configuration satisfies `keep`.
    pub fn filter<F: Fn(&Configuration) -> bool>(&self, keep: F) -> Self {
        Self { terms: self.terms.iter().filter(|(c, _)| keep(c)).map(|(c, a)| (c.clone(), a.clone())).collect() }
    }

    pub fn norm_sqr(&self) -> Result<A::Weight> {
        self.terms.values().try_fold(A::Weight::zero(), |acc, a| Ok(acc + a.norm_sqr()?))
    }

    pub fn is_normalized(&self) -> Result<bool> {
        Ok(A::is_unit(&self.norm_sqr()?))
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr()?;
        if norm.is_zero() {
            return Err(Error::NotNormalized("zero vector cannot be normalized".into()));
        }
        self.scale(&A::inverse_sqrt(&norm)?)
    }

    /// `⟨a† a⟩` for a normalized state.
    pub fn number_expectation(&self, mode: &ModeLabel) -> Result<A::Weight> {
        let norm = self.norm_sqr()?;
        if !A::is_unit(&norm) {
            return Err(Error::NotNormalized(norm.to_string()));
        }
        self.terms.iter().try_fold(A::Weight::zero(), |acc, (config, amp)| {
            let n = config.occupation(mode);
            if n == 0 {
                return Ok(acc);
            }
            Ok(acc + amp.norm_sqr()? * A::weight_from_u64(u64::from(n)))
        })
    }

    /// Mean photon number in `target` divided by the clone count `m`.
    pub fn reduced_single_clone_fidelity(&self, target: &ModeLabel, m: i64) -> Result<A::Weight> {
        if m <= 0 {
            return Err(Error::InvalidArgument(format!("clone count must be positive, got {m}")));
        }
        Ok(self.number_expectation(target)? / A::weight_from_u64(m as u64))
    }

    pub fn to_float(&self) -> FloatState {
        FockState { terms: self.terms.iter().map(|(c, a)| (c.clone(), a.to_complex())).collect() }
    }

    /// Schmidt coefficients of the signal/idler bipartition, largest first, for the
    /// state as given (normalize first if probabilities are wanted).
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut rows: Vec<Configuration> = self.terms.keys().map(|c| c.restrict(Beam::Signal)).collect();
        let mut cols: Vec<Configuration> = self.terms.keys().map(|c| c.restrict(Beam::Idler)).collect();
        rows.sort();
        rows.dedup();
        cols.sort();
        cols.dedup();
        if rows.is_empty() {
            return Vec::new();
        }
        let mut matrix = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
        for (config, amp) in &self.terms {
            let i = rows.binary_search(&config.restrict(Beam::Signal)).expect("row present");
            let j = cols.binary_search(&config.restrict(Beam::Idler)).expect("column present");
            matrix[(i, j)] = amp.to_complex();
        }
        let mut values: Vec<f64> = matrix.singular_values().iter().copied().filter(|s| *s > 1e-14).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }

    /// Von Neumann entropy (nats) of either reduced state.
    pub fn entanglement_entropy(&self) -> f64 {
        let s = self.schmidt_coefficients();
        let total: f64 = s.iter().map(|x| x * x).sum();
        s.iter()
            .map(|x| x * x / total)
            .filter(|p| *p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// Bilinear pair-creation operator `Σ c a†_s a†_i` over explicit signal/idler pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOperator<A: Amplitude> {
    pairs: Vec<(ModeLabel, ModeLabel, A)>,
}

impl<A: Amplitude> PairOperator<A> {
    pub fn new(pairs: Vec<(ModeLabel, ModeLabel, A)>) -> Result<Self> {
        for (s, i, _) in &pairs {
            if s.beam != Beam::Signal || i.beam != Beam::Idler {
                return Err(Error::InvalidArgument(format!("pair ({s}, {i}) must be (signal, idler)")));
            }
        }
        Ok(Self { pairs: pairs.into_iter().filter(|(_, _, c)| !c.is_zero()).collect() })
    }

    pub fn pairs(&self) -> &[(ModeLabel, ModeLabel, A)] {
        &self.pairs
    }

    pub fn apply(&self, state: &FockState<A>) -> Result<FockState<A>> {
        let mut out = FockState { terms: BTreeMap::new() };
        for (s, i, c) in &self.pairs {
            let term = state.create(*s)?.create(*i)?.scale(c)?;
            for (config, amp) in term.terms {
                out.accumulate(config, amp)?;
            }
        }
        Ok(out)
    }

    /// `(1/q!) P^q |seed⟩`, not renormalized.
    pub fn apply_power(&self, seed: &FockState<A>, q: u32) -> Result<FockState<A>> {
        let mut state = seed.clone();
        for _ in 0..q {
            state = self.apply(&state)?;
        }
        state.scale(&A::inverse_integer(&factorial(u64::from(q)))?)
    }
}

/// Pair coupling `c_ell` for `a†_{ell,s} a†_{-ell,i}` over a mode window, symmetric in `ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<A: Amplitude> {
    window: ModeWindow,
    values: BTreeMap<i32, A>,
}

impl<A: Amplitude> Coupling<A> {
    /// Equal coupling for every charge in the window (flat OAM spectrum).
    pub fn uniform(window: ModeWindow) -> Self {
        Self { window, values: window.charges().map(|l| (l, A::one())).collect() }
    }

    /// Coupling from explicit per-charge values; every window charge must be present and
    /// `c_ell == c_{-ell}`.
    pub fn new(window: ModeWindow, values: BTreeMap<i32, A>) -> Result<Self> {
        for l in window.charges() {
            let v = values
                .get(&l)
                .ok_or_else(|| Error::InvalidArgument(format!("coupling missing for charge {l}")))?;
            if values.get(&-l) != Some(v) {
                return Err(Error::InvalidArgument(format!("coupling not symmetric under {l} -> {}", -l)));
            }
        }
        if let Some(l) = values.keys().find(|l| !window.contains(**l)) {
            return Err(Error::OutsideWindow(format!("coupling charge {l}")));
        }
        Ok(Self { window, values })
    }

    pub fn window(&self) -> ModeWindow {
        self.window
    }

    pub fn value(&self, ell: i32) -> Option<&A> {
        self.values.get(&ell)
    }

    pub fn pair_operator(&self) -> PairOperator<A> {
        PairOperator {
            pairs: self
                .values
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, c)| (ModeLabel::signal(*l), ModeLabel::idler(-*l), c.clone()))
                .collect(),
        }
    }
}

/// The `q`-pair term `(1/q!) (Σ_ell c_ell a†_{ell,s} a†_{-ell,i})^q |seed⟩`, normalized.
pub fn apply_downconversion_power<A: Amplitude>(seed: &FockState<A>, q: i64, coupling: &Coupling<A>) -> Result<FockState<A>> {
    let q = u32::try_from(q).map_err(|_| Error::InvalidArgument(format!("pair count must be >= 0, got {q}")))?;
    let window = coupling.window();
    if let Some(mode) = seed.modes().find(|m| !window.contains(m.ell)) {
        return Err(Error::OutsideWindow(format!("{mode} (window ell_max = {})", window.ell_max())));
    }
    coupling.pair_operator().apply_power(seed, q)?.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn seed(n: u32) -> ExactState {
        FockState::number_state(ModeLabel::signal(1), n)
    }

    #[test]
    fn creation_on_vacuum_and_one() {
        let m = ModeLabel::signal(1);
        let one = ExactState::vacuum().create(m).unwrap();
        assert_eq!(one, seed(1));
        let two = one.create(m).unwrap();
        let cfg = Configuration::from_occupations([(m, 2)]);
        assert_eq!(two.amplitude(&cfg).unwrap().to_string(), "(1/1)·sqrt(2)");
    }

    #[test]
    fn repeated_creation_amplitude() {
        // (a†)^k |n⟩ = sqrt((n+k)!/n!) |n+k⟩
        let m = ModeLabel::idler(-2);
        for n in 0..4u32 {
            for k in 0..4u32 {
                let mut s = ExactState::number_state(m, n);
                for _ in 0..k {
                    s = s.create(m).unwrap();
                }
                let cfg = Configuration::from_occupations([(m, n + k)]);
                let sq = s.amplitude(&cfg).unwrap().square().unwrap();
                let expected = factorial(u64::from(n + k)) / factorial(u64::from(n));
                assert_eq!(sq, BigRational::from_integer(BigInt::from(expected)));
            }
        }
    }

    #[test]
    fn annihilation_inverts_creation_weight() {
        let m = ModeLabel::signal(1);
        let s = seed(3).annihilate(m).unwrap();
        let cfg = Configuration::from_occupations([(m, 2)]);
        assert_eq!(s.amplitude(&cfg).unwrap().square().unwrap(), rat(3, 1));
        assert!(ExactState::vacuum().annihilate(m).unwrap().is_empty());
    }

    #[test]
    fn biphoton_clone_state() {
        let window = ModeWindow::from_dimension(2).unwrap();
        let out = apply_downconversion_power(&seed(1), 1, &Coupling::uniform(window)).unwrap();
        assert_eq!(out.len(), 2);
        let stim = Configuration::from_occupations([(ModeLabel::signal(1), 2), (ModeLabel::idler(-1), 1)]);
        let spont = Configuration::from_occupations([
            (ModeLabel::signal(1), 1),
            (ModeLabel::signal(-1), 1),
            (ModeLabel::idler(1), 1),
        ]);
        assert_eq!(out.amplitude(&stim).unwrap().square().unwrap(), rat(2, 3));
        assert_eq!(out.amplitude(&spont).unwrap().square().unwrap(), rat(1, 3));
        let target = ModeLabel::signal(1);
        assert_eq!(out.number_expectation(&target).unwrap(), rat(5, 3));
        assert_eq!(out.reduced_single_clone_fidelity(&target, 2).unwrap(), rat(5, 6));
    }

    #[test]
    fn fock_seed_single_pair() {
        // (1/sqrt(n+2)) (sqrt(n+1) |(n+1)_1⟩|1_{-1}⟩ + |n_1, 1_{-1}⟩|1_1⟩)
        let window = ModeWindow::from_dimension(2).unwrap();
        for n in 1..6u32 {
            let out = apply_downconversion_power(&seed(n), 1, &Coupling::uniform(window)).unwrap();
            let stim = Configuration::from_occupations([(ModeLabel::signal(1), n + 1), (ModeLabel::idler(-1), 1)]);
            let p = out.amplitude(&stim).unwrap().square().unwrap();
            assert_eq!(p, rat(i64::from(n) + 1, i64::from(n) + 2));
            let f = out.reduced_single_clone_fidelity(&ModeLabel::signal(1), i64::from(n) + 1).unwrap();
            let n = i64::from(n);
            assert_eq!(f, rat(n + (n + 1) * (n + 1), (n + 1) * (n + 2)));
        }
    }

    #[test]
    fn zero_pairs_is_identity() {
        let window = ModeWindow::from_dimension(4).unwrap();
        let s = seed(3);
        assert_eq!(apply_downconversion_power(&s, 0, &Coupling::uniform(window)).unwrap(), s);
    }

    #[test]
    fn two_pair_fock_expectation() {
        // n = 2, q = 2, d = 2: Σ_k C(2+k, 2) (2+k) / Σ_k C(2+k, 2) over k = 0..=2 is (2 + 9 + 24) / 10
        let window = ModeWindow::from_dimension(2).unwrap();
        let out = apply_downconversion_power(&seed(2), 2, &Coupling::uniform(window)).unwrap();
        assert_eq!(out.number_expectation(&ModeLabel::signal(1)).unwrap(), rat(7, 2));
        assert_eq!(out.reduced_single_clone_fidelity(&ModeLabel::signal(1), 4).unwrap(), rat(7, 8));
    }

    #[test]
    fn d4_single_copy_fidelity() {
        let window = ModeWindow::from_dimension(4).unwrap();
        let out = apply_downconversion_power(&seed(1), 1, &Coupling::uniform(window)).unwrap();
        assert_eq!(out.reduced_single_clone_fidelity(&ModeLabel::signal(1), 2).unwrap(), rat(7, 10));
    }

    #[test]
    fn error_paths() {
        let window = ModeWindow::from_dimension(2).unwrap();
        let coupling = Coupling::<Surd>::uniform(window);
        assert!(apply_downconversion_power(&seed(1), -1, &coupling).is_err());
        let outside = ExactState::number_state(ModeLabel::signal(2), 1);
        assert!(matches!(apply_downconversion_power(&outside, 1, &coupling), Err(Error::OutsideWindow(_))));
        let unnormalized = seed(1).scale(&Surd::from_integer(2)).unwrap();
        assert!(unnormalized.number_expectation(&ModeLabel::signal(1)).is_err());
        assert!(seed(1).reduced_single_clone_fidelity(&ModeLabel::signal(1), 0).is_err());
        assert!(ModeWindow::from_dimension(3).is_err());
        assert!(ModeWindow::from_dimension(0).is_err());
    }

    #[test]
    fn asymmetric_coupling_rejected() {
        let window = ModeWindow::from_dimension(2).unwrap();
        let mut values = BTreeMap::new();
        values.insert(1, Complex64::new(1.0, 0.0));
        values.insert(-1, Complex64::new(0.5, 0.0));
        assert!(Coupling::new(window, values.clone()).is_err());
        values.insert(-1, Complex64::new(1.0, 0.0));
        assert!(Coupling::new(window, values.clone()).is_ok());
        values.insert(2, Complex64::new(1.0, 0.0));
        assert!(Coupling::new(window, values).is_err());
    }

    #[test]
    fn vacuum_expectation_is_zero() {
        assert_eq!(ExactState::vacuum().number_expectation(&ModeLabel::signal(1)).unwrap(), rat(0, 1));
    }

    #[test]
    fn float_mode_matches_exact() {
        let window = ModeWindow::from_dimension(4).unwrap();
        let seed_f = FloatState::number_state(ModeLabel::signal(2), 2);
        let out = apply_downconversion_power(&seed_f, 3, &Coupling::uniform(window)).unwrap();
        let exact = apply_downconversion_power(&ExactState::number_state(ModeLabel::signal(2), 2), 3, &Coupling::uniform(window))
            .unwrap();
        let target = ModeLabel::signal(2);
        let fe = exact.number_expectation(&target).unwrap().to_f64().unwrap();
        assert!((out.number_expectation(&target).unwrap() - fe).abs() < 1e-12);
    }
}
