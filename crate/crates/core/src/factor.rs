//! Integer factorization of 2^e - 1 group orders: trial division followed by
//! Pollard rho (Brent variant) with an iteration budget.

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;
pub(crate) const DEFAULT_RHO_BUDGET: u64 = 50_000_000;

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the seven-base set covers all of u64).
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho (Brent). Returns a nontrivial factor of composite `n`,
/// or None when the budget runs out.
fn pollard_rho(n: u64, budget: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return Some(d);
        }
        c += 1;
        if c > 20 {
            return None;
        }
    }
}

fn factor_into(n: u64, budget: &mut u64, out: &mut Vec<u64>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    let d = pollard_rho(n, budget).ok_or(Error::FactorizationTimeout(n as u128))?;
    factor_into(d, budget, out)?;
    factor_into(n / d, budget, out)
}

/// Prime factorization (with multiplicity, sorted ascending) of `n`.
pub(crate) fn factor(n: u64, rho_budget: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p as u128 * p as u128 <= n as u128 {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut budget = rho_budget;
        factor_into(n, &mut budget, &mut out)?;
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_mersenne_orders() {
        assert_eq!(factor(63, DEFAULT_RHO_BUDGET).unwrap(), vec![3, 3, 7]);
        assert_eq!(factor(511, DEFAULT_RHO_BUDGET).unwrap(), vec![7, 73]);
        assert_eq!(
            factor((1u64 << 24) - 1, DEFAULT_RHO_BUDGET).unwrap(),
            vec![3, 3, 5, 7, 13, 17, 241]
        );
    }

    #[test]
    fn factors_large_order_via_rho() {
        // 2^64 - 1 = 3 * 5 * 17 * 257 * 641 * 65537 * 6700417
        let f = factor(u64::MAX, DEFAULT_RHO_BUDGET).unwrap();
        assert_eq!(f, vec![3, 5, 17, 257, 641, 65537, 6700417]);
        assert_eq!(f.iter().map(|&p| p as u128).product::<u128>(), u64::MAX as u128);
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(2));
        assert!(is_prime(7));
        assert!(is_prime(6700417));
        assert!(!is_prime(1));
        assert!(!is_prime(6700417 * 3));
    }
}
