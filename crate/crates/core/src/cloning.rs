//! Optimal N → M cloning fidelities: the closed-form bound, the binomial counting sum,
//! a brute-force enumeration of photon distributions, and the fidelity read off the
//! explicit down-converted Fock state.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::Surd;
use crate::fock::{apply_downconversion_power, Amplitude, Coupling, FockState, ModeLabel, ModeWindow};
use crate::special::binomial;

/// Largest number of weak compositions for which the exact state route is used.
pub const EXACT_STATE_BUDGET: u64 = 1_000_000;
/// Largest number of compositions [`brute_force_enumeration`] walks.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;
/// Agreement required when the state route falls back to floating point.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// `N` initial copies cloned to `M` outputs in dimension `d`, seeding signal mode `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloningScenario {
    n_initial: u32,
    m_final: u32,
    dimension: u32,
    target: ModeLabel,
}

impl CloningScenario {
    /// Scenario with the default target `ell = +1`.
    pub fn new(n_initial: u32, m_final: u32, dimension: u32) -> Result<Self> {
        Self::with_target(n_initial, m_final, dimension, ModeLabel::signal(1))
    }

    pub fn with_target(n_initial: u32, m_final: u32, dimension: u32, target: ModeLabel) -> Result<Self> {
        if n_initial < 1 {
            return Err(Error::InvalidArgument("need at least one initial copy".into()));
        }
        if m_final < n_initial {
            return Err(Error::InvalidArgument(format!("M = {m_final} must be >= N = {n_initial}")));
        }
        if dimension < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {dimension}")));
        }
        if target.beam != crate::fock::Beam::Signal || target.ell == 0 || target.ell.unsigned_abs() > dimension / 2 {
            return Err(Error::OutsideWindow(format!("target {target} for d = {dimension}")));
        }
        Ok(Self { n_initial, m_final, dimension, target })
    }

    pub fn n_initial(&self) -> u32 {
        self.n_initial
    }

    pub fn m_final(&self) -> u32 {
        self.m_final
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn target(&self) -> ModeLabel {
        self.target
    }

    /// Number of down-converted pairs `q = M - N`.
    pub fn pairs(&self) -> u32 {
        self.m_final - self.n_initial
    }

    /// Number of weak compositions of `q` into `d` parts, `C(q + d - 1, d - 1)`.
    pub fn compositions(&self) -> BigUint {
        let q = u64::from(self.pairs());
        let d = u64::from(self.dimension);
        binomial(q + d - 1, d - 1)
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `(M - N + N (M + d)) / (M (N + d))`.
pub fn optimal_fidelity(s: &CloningScenario) -> BigRational {
    let (n, m, d) = (u64::from(s.n_initial), u64::from(s.m_final), u64::from(s.dimension));
    ratio(BigUint::from(m - n + n * (m + d)), BigUint::from(m * (n + d)))
}

/// `Σ_k C(n+q-k, n) C(d+k-2, k) (n+q-k) / (m Σ_k C(n+q-k, n) C(d+k-2, k))`.
pub fn counting_fidelity(s: &CloningScenario) -> BigRational {
    let (n, q, d) = (u64::from(s.n_initial), u64::from(s.pairs()), u64::from(s.dimension));
    let (total, weighted) = (0..=q).fold((BigUint::zero(), BigUint::zero()), |(total, weighted), k| {
        let w = binomial(n + q - k, n) * binomial(d + k - 2, k);
        let target = n + q - k;
        (total + &w, weighted + w * target)
    });
    ratio(weighted, total * u64::from(s.m_final))
}

/// Outcome of walking every distribution of `q` photons over `d` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    /// Σ over compositions of `C(n + q_t, n)`.
    pub total: BigUint,
    /// Σ over compositions of `C(n + q_t, n) (n + q_t)`.
    pub weighted_target: BigUint,
    /// Aggregated multiplicity for `k = q - q_t` photons outside the target mode, `k = 0..=q`.
    pub per_k: Vec<BigUint>,
    /// Number of compositions visited.
    pub compositions: u64,
}

impl Enumeration {
    pub fn fidelity(&self, m: u32) -> BigRational {
        ratio(self.weighted_target.clone(), &self.total * u64::from(m))
    }
}

/// Visits every weak composition `q_1 + … + q_d = q`.
fn for_each_composition<F: FnMut(&[u32])>(q: u32, d: usize, mut visit: F) {
    let mut parts = vec![0u32; d];
    parts[d - 1] = q;
    loop {
        visit(&parts);
        // Increment the rightmost free part whose prefix still leaves room, reset the rest.
        let Some(j) = (0..d - 1).rev().find(|&j| parts[..=j].iter().sum::<u32>() < q) else {
            return;
        };
        parts[j] += 1;
        parts[j + 1..d - 1].iter_mut().for_each(|p| *p = 0);
        parts[d - 1] = q - parts[..d - 1].iter().sum::<u32>();
    }
}

/// Explicit enumeration over weak compositions, bin 0 being the target mode.
pub fn brute_force_enumeration(s: &CloningScenario) -> Result<Enumeration> {
    let needed = s.compositions();
    if needed > BigUint::from(ENUMERATION_BUDGET) {
        return Err(Error::BudgetExceeded { needed: needed.to_string(), budget: ENUMERATION_BUDGET });
    }
    let (n, q) = (s.n_initial, s.pairs());
    let d = s.dimension as usize;
    // C(n + q_t, n) for each possible q_t
    let weights: Vec<BigUint> = (0..=q).map(|qt| binomial(u64::from(n + qt), u64::from(n))).collect();
    let mut per_k = vec![BigUint::zero(); q as usize + 1];
    let mut compositions = 0u64;
    for_each_composition(q, d, |parts| {
        let qt = parts[0];
        per_k[(q - qt) as usize] += &weights[qt as usize];
        compositions += 1;
    });
    let mut total = BigUint::zero();
    let mut weighted_target = BigUint::zero();
    for (k, w) in per_k.iter().enumerate() {
        total += w;
        weighted_target += w * u64::from(n + q - k as u32);
    }
    Ok(Enumeration { total, weighted_target, per_k, compositions })
}

/// The explicit output state: `n` photons in the target mode, `q` pairs down-converted
/// with flat coupling over the `d`-mode window.
pub fn clone_state<A: Amplitude>(s: &CloningScenario) -> Result<FockState<A>> {
    let window = ModeWindow::from_dimension(s.dimension)?;
    let seed = FockState::number_state(s.target, s.n_initial);
    apply_downconversion_power(&seed, i64::from(s.pairs()), &Coupling::uniform(window))
}

/// A fidelity from the state route, exact when the instance fits the exact budget.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFidelity {
    Exact(BigRational),
    Float(f64),
}

impl StateFidelity {
    pub fn to_f64(&self) -> f64 {
        match self {
            StateFidelity::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            StateFidelity::Float(x) => *x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// All three routes agree exactly.
    ExactEqual,
    /// Closed forms agree exactly and the float state route within [`FLOAT_TOLERANCE`].
    FloatAgree,
    Mismatch,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ExactEqual => "exact-equal",
            Verdict::FloatAgree => "float-agree",
            Verdict::Mismatch => "mismatch",
        }
    }

    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Mismatch)
    }
}

/// State-based, counting and closed-form fidelities for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityComparison {
    pub scenario: CloningScenario,
    pub state: StateFidelity,
    pub counting: BigRational,
    pub formula: BigRational,
    pub verdict: Verdict,
    /// Set when the exact state route was skipped.
    pub warning: Option<String>,
}

/// Compares the three fidelity routes. Exact arithmetic is used up to `exact_budget`
/// compositions, floating point beyond.
pub fn state_vs_formula_report_with_budget(s: &CloningScenario, exact_budget: u64) -> Result<FidelityComparison> {
    let counting = counting_fidelity(s);
    let formula = optimal_fidelity(s);
    let m = i64::from(s.m_final);
    let exact_fits = s.compositions() <= BigUint::from(exact_budget);
    let exact = if exact_fits {
        match clone_state::<Surd>(s).and_then(|st| st.reduced_single_clone_fidelity(&s.target, m)) {
            Ok(f) => Some(f),
            Err(Error::ExactUnsupported(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let (state, verdict, warning) = match exact {
        Some(f) => {
            let verdict = if f == counting && counting == formula { Verdict::ExactEqual } else { Verdict::Mismatch };
            (StateFidelity::Exact(f), verdict, None)
        }
        None => {
            let f: f64 = clone_state::<Complex64>(s)?.reduced_single_clone_fidelity(&s.target, m)?;
            let expected = formula.to_f64().unwrap_or(f64::NAN);
            let verdict = if counting == formula && (f - expected).abs() <= FLOAT_TOLERANCE {
                Verdict::FloatAgree
            } else {
                Verdict::Mismatch
            };
            let warning = format!("exact state budget exceeded ({} compositions); float comparison", s.compositions());
            (StateFidelity::Float(f), verdict, Some(warning))
        }
    };
    Ok(FidelityComparison { scenario: *s, state, counting, formula, verdict, warning })
}

pub fn state_vs_formula_report(s: &CloningScenario) -> Result<FidelityComparison> {
    state_vs_formula_report_with_budget(s, EXACT_STATE_BUDGET)
}

/// Scenarios `N in 1..=n_max`, `M in N..=m_max`, `d in dims`, ordered by `(N, M, d)`.
pub fn scenario_grid(n_max: u32, m_max: u32, dims: &[u32]) -> Result<Vec<CloningScenario>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for m in n..=m_max {
            for &d in dims {
                out.push(CloningScenario::new(n, m, d)?);
            }
        }
    }
    Ok(out)
}

/// Runs [`state_vs_formula_report`] over scenarios in parallel; output order follows input.
pub fn grid_report(scenarios: &[CloningScenario], exact_budget: u64) -> Result<Vec<FidelityComparison>> {
    scenarios.par_iter().map(|s| state_vs_formula_report_with_budget(s, exact_budget)).collect()
}
