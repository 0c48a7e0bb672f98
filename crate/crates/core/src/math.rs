//! Exact integer helpers.

use num_bigint::BigUint;
use num_traits::One;

/// `C(n, k)` computed exactly.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(n, k)` in `u64`, for the small arguments used inside the subset
/// enumerations. Returns `None` on overflow.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(5, 0), BigUint::from(1u32));
        assert_eq!(binomial(3, 5), BigUint::from(0u32));
        assert_eq!(binomial_u64(63, 31), Some(916_312_070_471_295_267));
        assert_eq!(binomial_u64(200, 100), None);
    }

    #[test]
    fn binomial_matches_factorials() {
        for n in 0..25u64 {
            for k in 0..=n {
                let via_fact = factorial(n) / (factorial(k) * factorial(n - k));
                assert_eq!(binomial(n, k), via_fact, "C({n},{k})");
            }
        }
    }
}
