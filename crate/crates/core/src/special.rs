//! Special functions and exact combinatorics used across the crate.

use num_bigint::BigUint;
use num_traits::One;

/// Associated Laguerre polynomial `L_n^alpha(x)` by the three-term recurrence in `n`.
pub fn assoc_laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `p! / (p + l)!` as a float. Exact products for small arguments, a log-sum otherwise.
pub fn factorial_ratio(p: u32, l: u32) -> f64 {
    if p + l <= 170 {
        (p + 1..=p + l).fold(1.0, |acc, j| acc / f64::from(j))
    } else {
        let log: f64 = (p + 1..=p + l).map(|j| f64::from(j).ln()).sum();
        (-log).exp()
    }
}

/// Binomial coefficient `C(n, k)` by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * j)
}
