//! Small integer helpers: primality, factorization, divisors, modular powers.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            let mut e = 0;
            while n % f == 0 {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, sorted.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (prime, exp) in factorize(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..exp {
            pk *= prime;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = (base as u128) % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Exact geometric sum `1 + r + ... + r^(terms-1)` with `r = p^k`, i.e.
/// `(p^(k*terms) - 1)/(p^k - 1)` (and `terms` when `k = 0`), reduced mod `modulus`.
pub fn geometric_quotient_mod(p: u64, k: u64, terms: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    if k == 0 {
        return terms % modulus;
    }
    let pk = BigUint::from(p).pow(k as u32);
    let num = pk.pow(terms as u32) - BigUint::one();
    let den = &pk - BigUint::one();
    let q = num / den;
    let r = q % BigUint::from(modulus);
    if r.is_zero() {
        0
    } else {
        r.to_u64_digits()[0]
    }
}

/// Largest power of two dividing `n` (`n > 0`).
pub fn two_part(n: u64) -> u64 {
    1u64 << n.trailing_zeros()
}
