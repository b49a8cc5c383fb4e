//! Binomial coefficients: exact big-integer values, their residues mod p via
//! Lucas' theorem, and images in a coefficient field. These drive the Hasse
//! derivative and every solvability test.

use num::bigint::BigInt;
use num::{One, Zero};

use super::coeff::{Field, K};

/// Exact C(n, k) as a big integer.
pub fn binom_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// C(n, k) mod p by Lucas: the product of binomials of base-p digits.
pub fn binom_mod_p(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut n = n;
    let mut k = k;
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        // digits are < p ≤ small, exact u128 product is fine
        let mut c = 1u128;
        let kd = kd.min(nd - kd);
        for i in 0..kd {
            c = c * (nd - i) as u128 / (i + 1) as u128;
        }
        acc = ((acc as u128 * (c % p as u128)) % p as u128) as u64;
        n /= p;
        k /= p;
    }
    acc
}

/// C(n, k) as a scalar of the given field.
pub fn binom_in(field: &Field, n: u64, k: u64) -> K {
    match field {
        Field::Q => field.from_bigint(&binom_big(n, k)),
        Field::Fq(f) => field.from_i64(binom_mod_p(n, k, f.p) as i64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lucas_matches_exact_factorials() {
        for p in [2u64, 3, 5, 7] {
            for n in 0..=40u64 {
                for k in 0..=n {
                    let exact = binom_big(n, k) % BigInt::from(p);
                    let exact: u64 = exact.try_into().unwrap();
                    assert_eq!(binom_mod_p(n, k, p), exact, "C({},{}) mod {}", n, k, p);
                }
            }
        }
    }

    #[test]
    fn known_binomial_residues() {
        assert_eq!(binom_mod_p(4, 2, 2), 0);
        assert_eq!(binom_mod_p(4, 4, 2), 1);
        assert_eq!(binom_mod_p(6, 3, 3), 2);
    }

    #[test]
    fn prime_power_vanishing() {
        // For r = r0 * p^s with p not dividing r0: C(r, λ) ≡ 0 unless p^s | λ,
        // and C(r, λ p^s) ≡ C(r0, λ).
        let (p, r0, s) = (2u64, 3u64, 2u32);
        let ps = p.pow(s);
        let r = r0 * ps;
        for lam in 1..r {
            if lam % ps != 0 {
                assert_eq!(binom_mod_p(r, lam, p), 0);
            } else {
                assert_eq!(binom_mod_p(r, lam, p), binom_mod_p(r0, lam / ps, p));
            }
        }
    }
}
