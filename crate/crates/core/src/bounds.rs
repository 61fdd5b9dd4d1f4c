//! The existence bound `F(n, p)` in exact rational arithmetic, the auxiliary
//! cubic `f_p`, primitive parts of `x^k - 1`, and brute-force counting
//! oracles over the Singer group.

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElt};

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn choose(n: u64, k: u64) -> BigInt {
    binomial(big(n), big(k))
}

/// `(C(n+p-1, n)^2 - C(n+p-2, n)^2) / p^n`.
pub fn f_difference_form(n: u64, p: u64) -> BigRational {
    let a = choose(n + p - 1, n);
    let b = choose(n + p - 2, n);
    BigRational::new(&a * &a - &b * &b, big(p).pow(n as u32))
}

/// `C(n+p-2, n-1)^2 (n + 2p - 2) / (n p^n)`.
pub fn f_product_form(n: u64, p: u64) -> BigRational {
    let c = choose(n + p - 2, n - 1);
    BigRational::new(&c * &c * big(n + 2 * p - 2), big(n) * big(p).pow(n as u32))
}

/// `F(n, p)`, evaluated both ways; a disagreement is an internal error.
pub fn bound_f(n: u64, p: u64) -> Result<BigRational> {
    if n == 0 || !is_prime(p) {
        return Err(Error::InvalidParams(format!("F(n, p) needs n ≥ 1 and p prime, got ({n}, {p})")));
    }
    let a = f_difference_form(n, p);
    let b = f_product_form(n, p);
    if a != b {
        return Err(Error::Consistency(format!("the two forms of F({n},{p}) disagree: {a} vs {b}")));
    }
    Ok(a)
}

/// Smallest `n` from which `F(n, p)` is known to decrease strictly.
pub fn monotone_from(p: u64) -> u64 {
    if p > 3 {
        (p + 1) / 2
    } else {
        p + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u64,
    /// `F(n, p)` as `"num/den"`.
    pub value: String,
    pub at_least_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: u64,
    pub rows: Vec<BoundRow>,
    /// Largest odd `n` with `F(n, p) ≥ 1`.
    pub n_p: u64,
}

/// Odd `n` from 1 upward until `F(n, p) < 1` inside the monotone range.
pub fn np_for(p: u64) -> Result<BoundReport> {
    let start = monotone_from(p);
    let one = BigRational::one();
    let mut rows = Vec::new();
    let mut n_p = 0;
    let mut n = 1;
    loop {
        let f = bound_f(n, p)?;
        let ok = f >= one;
        if ok {
            n_p = n;
        }
        rows.push(BoundRow { n, value: f.to_string(), at_least_one: ok });
        if !ok && n >= start {
            break;
        }
        n += 2;
    }
    Ok(BoundReport { p, rows, n_p })
}

/// [`np_for`] for every prime below `pmax`.
pub fn np_table(pmax: u64) -> Result<Vec<BoundReport>> {
    (2..pmax).filter(|&p| is_prime(p)).map(np_for).collect()
}

/// Whether `F(n+1, p) < F(n, p)` for every `n` in `from..to`.
pub fn strictly_decreasing(p: u64, from: u64, to: u64) -> Result<bool> {
    let mut prev = bound_f(from, p)?;
    for n in from + 1..=to {
        let next = bound_f(n, p)?;
        if next >= prev {
            return Ok(false);
        }
        prev = next;
    }
    Ok(true)
}

/// `F((p+1)/2, p) < 1` for an odd prime `p`.
pub fn half_point_below_one(p: u64) -> Result<bool> {
    if p % 2 == 0 {
        return Err(Error::InvalidParams("p must be odd".into()));
    }
    Ok(bound_f((p + 1) / 2, p)? < BigRational::one())
}

/// `f_p(n) = n^3 + (2p-3)n^2 - 3(p-1)n - 2p^2 + 3p - 1`.
pub fn fp_poly(n: i128, p: i128) -> i128 {
    n * n * n + (2 * p - 3) * n * n - 3 * (p - 1) * n - 2 * p * p + 3 * p - 1
}

/// `f_p((p+1)/2) = (p-1)(5p^2 - 18p + 1)/8` for odd `p`.
pub fn fp_half_identity(p: i128) -> bool {
    8 * fp_poly((p + 1) / 2, p) == (p - 1) * (5 * p * p - 18 * p + 1)
}

/// `f_p(p+1) = p(3p^2 - p + 2)`.
pub fn fp_successor_identity(p: i128) -> bool {
    fp_poly(p + 1, p) == p * (3 * p * p - p + 2)
}

/// Largest divisor of `x^k - 1` coprime to every `x^i - 1` with `1 ≤ i < k`.
pub fn primitive_part(x: u64, k: u32) -> Result<BigUint> {
    if x < 2 || k < 1 {
        return Err(Error::InvalidParams(format!("primitive part needs x ≥ 2, k ≥ 1, got ({x}, {k})")));
    }
    let xb = BigUint::from(x);
    let mut part = xb.pow(k) - BigUint::one();
    for i in 1..k {
        let other = xb.pow(i) - BigUint::one();
        let mut g = part.gcd(&other);
        while !g.is_one() {
            part /= &g;
            g = part.gcd(&g);
        }
    }
    Ok(part)
}

/// Solution count for `z^{q^n+1} = 1`, `Tr_{F_{q^{2n}}/F_{q^2}}(z) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KloostermanReport {
    pub q: u64,
    pub n: u32,
    pub count: u64,
    /// Whether `q^{n-2} - q^{-2} - 2(q^2-1) q^{n/2-2}` is positive.
    pub bound_positive: bool,
    /// `count` is at least the bound (checked only when it is positive).
    pub meets_bound: Option<bool>,
    pub ok: bool,
}

/// Sign of `R - S·√q` for rationals `R`, `S ≥ 0`.
fn cmp_with_sqrt(r: &BigRational, s: &BigRational, q: u64) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let qr = BigRational::from_integer(big(q));
    if r.is_negative() || r.is_zero() {
        return if s.is_zero() { r.cmp(&BigRational::zero()) } else { Less };
    }
    (r * r).cmp(&(s * s * qr))
}

pub fn kloosterman_count_oracle(ctx: &FieldCtx, cap: u64) -> Result<KloostermanReport> {
    let params = ctx.params();
    if !params.q_is_even() || params.n < 5 {
        return Err(Error::Precondition("needs q even and n ≥ 5".into()));
    }
    let singer = ctx.singer_order();
    if singer > cap {
        return Err(Error::Budget(format!("q^n + 1 = {singer} exceeds the cap {cap}")));
    }
    let count = (0..singer).filter(|&i| ctx.trace_to_fq2(ctx.omega_pow(i)) == FieldElt::ONE).count() as u64;
    let q = ctx.q();
    let n = params.n;
    let qr = |e: i64| {
        if e >= 0 {
            BigRational::from_integer(big(q).pow(e as u32))
        } else {
            BigRational::new(BigInt::one(), big(q).pow((-e) as u32))
        }
    };
    // bound = r - s·√q with q^{n/2 - 2} = q^{(n-5)/2} √q
    let r = qr(n as i64 - 2) - qr(-2);
    let s = BigRational::from_integer(big(2 * (q * q - 1))) * qr((n as i64 - 5) / 2);
    let bound_positive = cmp_with_sqrt(&r, &s, q).is_gt();
    let meets_bound = bound_positive.then(|| {
        let diff = BigRational::from_integer(big(count)) - &r;
        // count ≥ r - s√q  ⟺  (r - count) ≤ s√q
        !cmp_with_sqrt(&(-diff), &s, q).is_gt()
    });
    let ok = count >= 2 && meets_bound.unwrap_or(true);
    Ok(KloostermanReport { q, n, count, bound_positive, meets_bound, ok })
}

/// `true` iff no `x ∈ ⟨ω⟩ \ F_{q^2}` has `Tr_{F_{q^6}/F_{q^2}}(x) = 1` (`n = 3`).
pub fn trace_one_oracle(ctx: &FieldCtx, cap: u64) -> Result<bool> {
    let params = ctx.params();
    if params.n != 3 {
        return Err(Error::Precondition("needs n = 3".into()));
    }
    let singer = ctx.singer_order();
    if singer > cap {
        return Err(Error::Budget(format!("q^3 + 1 = {singer} exceeds the cap {cap}")));
    }
    let two_d = 2 * params.d;
    for i in 0..singer {
        let x = ctx.omega_pow(i);
        if !ctx.in_subfield(x, two_d)? && ctx.trace_to_fq2(x) == FieldElt::ONE {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn small_values() {
        assert_eq!(bound_f(3, 2).unwrap(), rat(15, 8));
        assert_eq!(bound_f(5, 2).unwrap(), rat(35, 32));
        assert_eq!(bound_f(5, 3).unwrap(), rat(5, 3));
        assert!(bound_f(7, 2).unwrap() < BigRational::one());
        assert!(bound_f(7, 3).unwrap() < BigRational::one());
        assert!(bound_f(3, 4).is_err());
    }

    #[test]
    fn np_rows() {
        assert_eq!(np_for(2).unwrap().n_p, 5);
        assert_eq!(np_for(5).unwrap().n_p, 7);
        assert_eq!(np_for(29).unwrap().n_p, 15);
        assert_eq!(np_for(43).unwrap().n_p, 17);
    }

    #[test]
    fn cubic_values() {
        // 27 + 63 - 36 - 50 + 15 - 1
        assert_eq!(fp_poly(3, 5), 18);
        assert_eq!(fp_poly(3, 2), 24);
        assert_eq!(fp_poly(4, 7), 90);
        assert!(fp_half_identity(7) && fp_successor_identity(2));
    }

    #[test]
    fn primitive_parts() {
        assert_eq!(primitive_part(2, 6).unwrap(), BigUint::from(1u32));
        assert_eq!(primitive_part(2, 4).unwrap(), BigUint::from(5u32));
        assert_eq!(primitive_part(2, 18).unwrap(), BigUint::from(19u32));
        assert!(primitive_part(1, 3).is_err());
    }

    #[test]
    fn sqrt_comparison() {
        use std::cmp::Ordering::*;
        // 3 vs 1·√8
        assert_eq!(cmp_with_sqrt(&rat(3, 1), &rat(1, 1), 8), Greater);
        assert_eq!(cmp_with_sqrt(&rat(2, 1), &rat(1, 1), 8), Less);
        assert_eq!(cmp_with_sqrt(&rat(2, 1), &rat(1, 1), 4), Equal);
        assert_eq!(cmp_with_sqrt(&rat(-1, 1), &rat(0, 1), 4), Less);
    }
}
