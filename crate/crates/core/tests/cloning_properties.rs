use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use stimpdc::cloning::{
    brute_force_enumeration, counting_fidelity, grid_report, optimal_fidelity, scenario_grid,
    state_vs_formula_report, state_vs_formula_report_with_budget, CloningScenario, StateFidelity, Verdict,
};
use stimpdc::fock::ModeLabel;

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

fn rat(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn scen(n: u32, m: u32, d: u32) -> CloningScenario {
    CloningScenario::new(n, m, d).unwrap()
}

proptest! {
    #[test]
    fn counting_equals_optimal(n in 1u32..20, extra in 0u32..40, half_d in 1u32..20) {
        let s = scen(n, n + extra, 2 * half_d);
        prop_assert_eq!(counting_fidelity(&s), optimal_fidelity(&s));
    }

    #[test]
    fn fidelity_bounds(n in 1u32..30, extra in 0u32..60, half_d in 1u32..30) {
        let d = 2 * half_d;
        let f = optimal_fidelity(&scen(n, n + extra, d));
        prop_assert!(f > rat(1, u64::from(d)));
        prop_assert!(f <= rat(1, 1));
        prop_assert_eq!(f == rat(1, 1), extra == 0);
    }

    #[test]
    fn fidelity_decreases_with_dimension_and_clones(n in 1u32..10, extra in 1u32..20, half_d in 1u32..10) {
        let d = 2 * half_d;
        let m = n + extra;
        prop_assert!(optimal_fidelity(&scen(n, m, d + 2)) < optimal_fidelity(&scen(n, m, d)));
        prop_assert!(optimal_fidelity(&scen(n, m + 1, d)) < optimal_fidelity(&scen(n, m, d)));
        prop_assert!(optimal_fidelity(&scen(n + 1, m, d)) > optimal_fidelity(&scen(n, m, d)));
    }
}

#[test]
fn enumeration_matches_binomial_multiplicities() {
    for n in 1..=3u32 {
        for q in 0..=5u32 {
            for d in [2u32, 4, 6] {
                let s = scen(n, n + q, d);
                let e = brute_force_enumeration(&s).unwrap();
                assert_eq!(e.per_k.len(), q as usize + 1);
                for (k, got) in e.per_k.iter().enumerate() {
                    let k = k as u64;
                    let expected = binomial(u64::from(n + q) - k, u64::from(n)) * binomial(u64::from(d) + k - 2, k);
                    assert_eq!(got, &expected, "n={n} q={q} d={d} k={k}");
                }
                assert_eq!(BigUint::from(e.compositions), binomial(u64::from(q + d - 1), u64::from(d - 1)));
                assert_eq!(e.fidelity(n + q), optimal_fidelity(&s));
            }
        }
    }
}

#[test]
fn large_clone_limit() {
    for (n, d) in [(1u32, 2u32), (2, 4), (3, 8)] {
        let f = optimal_fidelity(&scen(n, 10_000, d)).to_f64().unwrap();
        let limit = f64::from(n + 1) / f64::from(n + d);
        assert!((f - limit).abs() < 1e-3, "n={n} d={d}: {f} vs {limit}");
    }
}

#[test]
fn state_route_reproduces_known_values() {
    let r = state_vs_formula_report(&scen(1, 2, 2)).unwrap();
    assert_eq!(r.state, StateFidelity::Exact(rat(5, 6)));
    assert_eq!(r.verdict, Verdict::ExactEqual);
    let r = state_vs_formula_report(&scen(1, 2, 4)).unwrap();
    assert_eq!(r.state, StateFidelity::Exact(rat(7, 10)));
}

#[test]
fn target_choice_does_not_matter() {
    for ell in [-2, -1, 1, 2] {
        let s = CloningScenario::with_target(1, 3, 4, ModeLabel::signal(ell)).unwrap();
        let r = state_vs_formula_report(&s).unwrap();
        assert_eq!(r.verdict, Verdict::ExactEqual, "target {ell}");
    }
    assert!(CloningScenario::with_target(1, 3, 4, ModeLabel::signal(3)).is_err());
    assert!(CloningScenario::with_target(1, 3, 4, ModeLabel::idler(1)).is_err());
}

#[test]
fn float_fallback_agrees_when_budget_is_small() {
    let r = state_vs_formula_report_with_budget(&scen(2, 5, 4), 1).unwrap();
    assert_eq!(r.verdict, Verdict::FloatAgree);
    assert!(r.warning.is_some());
    assert!(matches!(r.state, StateFidelity::Float(_)));
}

#[test]
fn small_grid_is_exact_and_ordered() {
    let grid = scenario_grid(2, 4, &[2, 4]).unwrap();
    let report = grid_report(&grid, 1_000_000).unwrap();
    assert_eq!(report.len(), grid.len());
    for (r, s) in report.iter().zip(&grid) {
        assert_eq!(&r.scenario, s);
        assert_eq!(r.verdict, Verdict::ExactEqual);
    }
}

#[test]
fn invalid_scenarios_are_rejected() {
    assert!(CloningScenario::new(0, 2, 2).is_err());
    assert!(CloningScenario::new(3, 2, 2).is_err());
    assert!(CloningScenario::new(1, 2, 1).is_err());
}
