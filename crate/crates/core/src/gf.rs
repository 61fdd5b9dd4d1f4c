//! Arithmetic in the tower `F_p ⊂ F_q ⊂ F_{q^2} ⊂ F_{q^n} ⊂ F_{q^{2n}}`, all
//! realized inside the single field `F_{p^{2nd}}`.
//!
//! An element is stored as its canonical integer encoding: the coefficient
//! vector over `F_p` (ascending degree, modulo the context's defining
//! polynomial) read as base-`p` digits. Ordering on [`FieldElt`] is therefore
//! ordering by encoding, which is what every canonical-form rule in the crate
//! relies on.
//!
//! Small fields (at most [`DEFAULT_ZECH_THRESHOLD`] elements unless
//! configured otherwise) get discrete-log/Zech tables; larger ones use
//! table-free polynomial arithmetic. Both paths produce identical encodings.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};

/// Largest supported ambient field, in bits of `p^{2nd}`.
pub const MAX_FIELD_BITS: u32 = 40;

/// Fields with at most this many elements get log/Zech tables by default.
pub const DEFAULT_ZECH_THRESHOLD: u64 = 1 << 20;

const MAX_DEGREE: usize = 64;
const OMEGA_TABLE_CAP: u64 = 1 << 24;
const NO_LOG: u32 = u32::MAX;

/// Field parameters `(p, d, n)` with `q = p^d` and `n` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub p: u64,
    pub d: u32,
    pub n: u32,
}

impl Params {
    pub fn new(p: u64, d: u32, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        if d == 0 {
            return Err(Error::InvalidParams("d must be positive".into()));
        }
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParams(format!("n = {n} must be odd and at least 3")));
        }
        let degree = 2 * n * d;
        match p.checked_pow(degree) {
            Some(order) if order < (1u64 << 63) => Ok(Params { p, d, n }),
            _ => Err(Error::FieldTooLarge { p, degree }),
        }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.d)
    }

    /// Degree `2nd` of the ambient field over `F_p`.
    pub fn degree(&self) -> u32 {
        2 * self.n * self.d
    }

    /// `q^n + 1`, the order of the Singer cycle `ω`.
    pub fn singer_order(&self) -> u64 {
        self.q().pow(self.n) + 1
    }

    pub fn q_is_even(&self) -> bool {
        self.p == 2
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, d={}, n={})", self.p, self.d, self.n)
    }
}

/// An element of the ambient field, as its canonical integer encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElt(u64);

impl FieldElt {
    pub const ZERO: FieldElt = FieldElt(0);
    pub const ONE: FieldElt = FieldElt(1);

    pub fn encoding(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Polynomial arithmetic modulo a fixed monic polynomial, on encodings.
#[derive(Clone)]
struct PolyArith {
    p: u64,
    degree: usize,
    order: u64,
    /// `x^degree = sum reduction[j] x^j`, i.e. the negated low coefficients.
    reduction: Vec<u64>,
    /// For `p = 2`: the low part of the modulus as a bit mask.
    binary_low: u64,
}

impl PolyArith {
    fn new(p: u64, modulus: &[u64]) -> Self {
        let degree = modulus.len() - 1;
        let reduction: Vec<u64> = modulus[..degree].iter().map(|&c| (p - c % p) % p).collect();
        let binary_low = if p == 2 {
            modulus[..degree]
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &c)| acc | ((c & 1) << i))
        } else {
            0
        };
        PolyArith { p, degree, order: p.pow(degree as u32), reduction, binary_low }
    }

    #[inline]
    fn unpack(&self, mut x: u64, out: &mut [u64; MAX_DEGREE]) {
        for slot in out.iter_mut().take(self.degree) {
            *slot = x % self.p;
            x /= self.p;
        }
    }

    #[inline]
    fn pack(&self, digits: &[u64]) -> u64 {
        digits[..self.degree].iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut da, mut db) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        for i in 0..self.degree {
            da[i] = (da[i] + db[i]) % self.p;
        }
        self.pack(&da)
    }

    fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        let mut da = [0u64; MAX_DEGREE];
        self.unpack(a, &mut da);
        for c in da.iter_mut().take(self.degree) {
            *c = (self.p - *c) % self.p;
        }
        self.pack(&da)
    }

    fn scale(&self, a: u64, c: u64) -> u64 {
        let c = c % self.p;
        if self.p == 2 {
            return if c == 0 { 0 } else { a };
        }
        let mut da = [0u64; MAX_DEGREE];
        self.unpack(a, &mut da);
        for v in da.iter_mut().take(self.degree) {
            *v = *v * c % self.p;
        }
        self.pack(&da)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return self.mul_binary(a, b);
        }
        let (mut da, mut db) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        let deg = self.degree;
        let mut acc = [0u64; 2 * MAX_DEGREE];
        for i in 0..deg {
            if da[i] == 0 {
                continue;
            }
            for j in 0..deg {
                acc[i + j] += da[i] * db[j];
            }
        }
        for i in (deg..2 * deg - 1).rev() {
            let c = acc[i] % self.p;
            if c != 0 {
                for (j, &r) in self.reduction.iter().enumerate() {
                    acc[i - deg + j] += c * r;
                }
            }
        }
        for v in acc.iter_mut().take(deg) {
            *v %= self.p;
        }
        self.pack(&acc)
    }

    #[inline]
    fn mul_binary(&self, a: u64, b: u64) -> u64 {
        let mut r = clmul(a, b);
        let deg = self.degree as u32;
        let mask = (1u128 << deg) - 1;
        while r >> deg != 0 {
            let hi = (r >> deg) as u64;
            r = (r & mask) ^ clmul(hi, self.binary_low);
        }
        r as u64
    }

    fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

#[inline]
fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let mut bits = b;
    while bits != 0 {
        let i = bits.trailing_zeros();
        r ^= (a as u128) << i;
        bits &= bits - 1;
    }
    r
}

/// Discrete-log and Zech tables relative to the primitive element `g`.
struct ZechTables {
    /// `log[x]` for nonzero encodings `x`.
    log: Vec<u32>,
    /// `exp[k] = g^k`, stored twice over so sums of two logs need no reduction.
    exp: Vec<u32>,
    /// `zech[k] = log(1 + g^k)` (odd `p` only).
    zech: Vec<u32>,
}

/// A fixed `F_p`-linear map on the ambient field, stored by the images of the
/// monomial basis.
#[derive(Clone)]
struct LinearMap {
    cols: Vec<u64>,
    digit_cols: Vec<[u64; MAX_DEGREE]>,
}

impl LinearMap {
    fn from_images(arith: &PolyArith, cols: Vec<u64>) -> Self {
        let digit_cols = if arith.p == 2 {
            Vec::new()
        } else {
            cols.iter()
                .map(|&c| {
                    let mut d = [0u64; MAX_DEGREE];
                    arith.unpack(c, &mut d);
                    d
                })
                .collect()
        };
        LinearMap { cols, digit_cols }
    }

    #[inline]
    fn apply(&self, arith: &PolyArith, x: u64) -> u64 {
        if arith.p == 2 {
            let mut r = 0u64;
            let mut bits = x;
            while bits != 0 {
                r ^= self.cols[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            return r;
        }
        let mut dx = [0u64; MAX_DEGREE];
        arith.unpack(x, &mut dx);
        let mut acc = [0u64; MAX_DEGREE];
        for (t, &c) in dx.iter().take(arith.degree).enumerate() {
            if c == 0 {
                continue;
            }
            let col = &self.digit_cols[t];
            for j in 0..arith.degree {
                acc[j] += c * col[j];
            }
        }
        for v in acc.iter_mut().take(arith.degree) {
            *v %= arith.p;
        }
        arith.pack(&acc)
    }
}

/// Construction options for [`FieldCtx`].
#[derive(Clone, Debug)]
pub struct CtxOptions {
    /// Build log/Zech tables when the field has at most this many elements.
    pub zech_threshold: u64,
    /// Use this defining polynomial instead of the least primitive one.
    pub modulus: Option<Vec<u64>>,
}

impl Default for CtxOptions {
    fn default() -> Self {
        CtxOptions { zech_threshold: DEFAULT_ZECH_THRESHOLD, modulus: None }
    }
}

/// `x = f · ω^i · ω₀^eps` with `f ∈ F_{q^n}^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CosetDecomposition {
    pub f: FieldElt,
    pub i: u64,
    pub eps: u8,
}

/// The field tower for one [`Params`]. Immutable once built.
pub struct FieldCtx {
    params: Params,
    modulus: Vec<u64>,
    arith: PolyArith,
    /// Prime factors of `p^{2nd} - 1`.
    group_factors: Vec<u64>,
    g: FieldElt,
    omega0: FieldElt,
    omega: FieldElt,
    tables: Option<ZechTables>,
    /// `frob[i]` is `x ↦ x^{p^i}`.
    frob: Vec<LinearMap>,
    /// `Tr_{F_{q^{2n}}/F_{q^2}}`.
    trace_fq2: LinearMap,
    omega_powers: Vec<FieldElt>,
    omega_log: Option<HashMap<u64, u32>>,
    /// Nonzero elements of `F_{q^2}`, powers of its generator.
    fq2_units: Vec<FieldElt>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("params", &self.params)
            .field("modulus", &self.modulus)
            .field("zech", &self.tables.is_some())
            .finish()
    }
}

/// JSON form of a field context: `{p, d, n, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCtxJson {
    pub p: u64,
    pub d: u32,
    pub n: u32,
    pub modulus: Vec<u64>,
}

/// The lexicographically least (by ascending-degree coefficient sequence)
/// monic primitive polynomial of the given degree over `F_p`.
pub fn least_primitive_polynomial(p: u64, degree: u32) -> Result<Vec<u64>> {
    let order = p
        .checked_pow(degree)
        .filter(|o| o.ilog2() < MAX_FIELD_BITS)
        .ok_or(Error::FieldTooLarge { p, degree })?;
    let factors: Vec<u64> = factorize(order - 1).into_iter().map(|(r, _)| r).collect();
    let deg = degree as usize;
    // coefficients c_0..c_{deg-1}; c_0 is the most significant position.
    let mut coeffs = vec![0u64; deg];
    coeffs[0] = 1;
    loop {
        let mut modulus = coeffs.clone();
        modulus.push(1);
        if is_primitive(p, &modulus, &factors) {
            return Ok(modulus);
        }
        let mut pos = deg;
        loop {
            if pos == 0 {
                return Err(Error::Consistency(format!(
                    "no primitive polynomial of degree {degree} over F_{p}"
                )));
            }
            pos -= 1;
            coeffs[pos] += 1;
            if coeffs[pos] < p {
                break;
            }
            coeffs[pos] = 0;
        }
    }
}

fn is_primitive(p: u64, modulus: &[u64], factors: &[u64]) -> bool {
    let deg = modulus.len() - 1;
    if modulus[0] % p == 0 {
        return false;
    }
    // f(1) = 0 means x - 1 divides f.
    if deg > 1 && modulus.iter().sum::<u64>() % p == 0 {
        return false;
    }
    let arith = PolyArith::new(p, modulus);
    let x = if deg == 1 { arith.reduction[0] } else { p };
    let n = arith.order - 1;
    if arith.pow(x, n as u128) != 1 {
        return false;
    }
    factors.iter().all(|&r| arith.pow(x, (n / r) as u128) != 1)
}

impl FieldCtx {
    pub fn new(params: Params) -> Result<Self> {
        Self::with_options(params, CtxOptions::default())
    }

    pub fn with_options(params: Params, options: CtxOptions) -> Result<Self> {
        let Params { p, d, n } = Params::new(params.p, params.d, params.n)?;
        let degree = 2 * n * d;
        let order = p.pow(degree);
        if order.ilog2() >= MAX_FIELD_BITS {
            return Err(Error::FieldTooLarge { p, degree });
        }
        let modulus = match options.modulus {
            Some(m) => {
                if m.len() != degree as usize + 1 || m[degree as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidParams(format!(
                        "modulus must be a monic degree-{degree} polynomial over F_{p}"
                    )));
                }
                let factors: Vec<u64> = factorize(order - 1).into_iter().map(|(r, _)| r).collect();
                if !is_primitive(p, &m, &factors) {
                    return Err(Error::InvalidParams("modulus is not primitive".into()));
                }
                m
            }
            None => least_primitive_polynomial(p, degree)?,
        };
        let arith = PolyArith::new(p, &modulus);
        let group_factors = factorize(order - 1).into_iter().map(|(r, _)| r).collect();
        let g = FieldElt(p);

        let tables = (order <= options.zech_threshold).then(|| build_tables(&arith, g.0));

        let mut frob = Vec::with_capacity(degree as usize);
        let mut images: Vec<u64> = (0..degree).map(|t| p.pow(t)).collect();
        let frob_p: Vec<u64> = images.iter().map(|&b| arith.pow(b, p as u128)).collect();
        let frob_p_map = LinearMap::from_images(&arith, frob_p);
        for _ in 0..degree {
            frob.push(LinearMap::from_images(&arith, images.clone()));
            images = images.iter().map(|&c| frob_p_map.apply(&arith, c)).collect();
        }

        let q = params.q();
        let singer = q.pow(n) + 1;
        let group_order = order - 1;
        let exp0 = group_order / (singer * (q - 1));

        let mut ctx = FieldCtx {
            params: Params { p, d, n },
            modulus,
            arith,
            group_factors,
            g,
            omega0: FieldElt::ONE,
            omega: FieldElt::ONE,
            tables,
            frob,
            trace_fq2: LinearMap { cols: Vec::new(), digit_cols: Vec::new() },
            omega_powers: Vec::new(),
            omega_log: None,
            fq2_units: Vec::new(),
        };
        ctx.omega0 = ctx.pow(g, exp0 as u128);
        ctx.omega = ctx.pow(ctx.omega0, (q - 1) as u128);

        let trace_images: Vec<u64> = (0..degree)
            .map(|t| {
                let basis = FieldElt(p.pow(t));
                (0..n).fold(FieldElt::ZERO, |acc, i| ctx.add(acc, ctx.frobenius(basis, (2 * d * i) as i64))).0
            })
            .collect();
        ctx.trace_fq2 = LinearMap::from_images(&ctx.arith, trace_images);

        ctx.fq2_units = ctx.subfield_elements(2 * d)?.split_off(1);
        if singer <= OMEGA_TABLE_CAP {
            let mut powers = Vec::with_capacity(singer as usize);
            let mut w = FieldElt::ONE;
            for _ in 0..singer {
                powers.push(w);
                w = ctx.mul(w, ctx.omega);
            }
            if ctx.tables.is_none() {
                ctx.omega_log = Some(powers.iter().enumerate().map(|(i, w)| (w.0, i as u32)).collect());
            }
            ctx.omega_powers = powers;
        }
        Ok(ctx)
    }

    pub fn from_json(json: &FieldCtxJson) -> Result<Self> {
        let params = Params::new(json.p, json.d, json.n)?;
        Self::with_options(params, CtxOptions { modulus: Some(json.modulus.clone()), ..CtxOptions::default() })
    }

    pub fn to_json(&self) -> FieldCtxJson {
        FieldCtxJson { p: self.params.p, d: self.params.d, n: self.params.n, modulus: self.modulus.clone() }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn q(&self) -> u64 {
        self.params.q()
    }

    /// Degree of the ambient field over `F_p`.
    pub fn degree(&self) -> u32 {
        self.params.degree()
    }

    /// Number of elements of the ambient field.
    pub fn order(&self) -> u64 {
        self.arith.order
    }

    pub fn singer_order(&self) -> u64 {
        self.params.singer_order()
    }

    /// Ascending coefficients of the defining polynomial, leading 1 included.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn has_zech_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn zero(&self) -> FieldElt {
        FieldElt::ZERO
    }

    pub fn one(&self) -> FieldElt {
        FieldElt::ONE
    }

    /// The primitive element (residue of the indeterminate).
    pub fn g(&self) -> FieldElt {
        self.g
    }

    /// Fixed element of order `(q^n+1)(q-1)`.
    pub fn omega0(&self) -> FieldElt {
        self.omega0
    }

    /// `ω = ω₀^{q-1}`, of order `q^n + 1`.
    pub fn omega(&self) -> FieldElt {
        self.omega
    }

    /// The `q^2 - 1` nonzero elements of `F_{q^2}`.
    pub fn fq2_units(&self) -> &[FieldElt] {
        &self.fq2_units
    }

    /// Element with the given encoding.
    pub fn elt(&self, encoding: u64) -> Result<FieldElt> {
        if encoding >= self.arith.order {
            return Err(Error::Format(format!("encoding {encoding} out of range")));
        }
        Ok(FieldElt(encoding))
    }

    /// The prime-field element `c mod p`.
    pub fn scalar(&self, c: u64) -> FieldElt {
        FieldElt(c % self.params.p)
    }

    pub fn coeffs(&self, a: FieldElt) -> Vec<u64> {
        let mut d = [0u64; MAX_DEGREE];
        self.arith.unpack(a.0, &mut d);
        d[..self.arith.degree].to_vec()
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElt> {
        if coeffs.len() > self.arith.degree {
            return Err(Error::Format(format!(
                "{} coefficients given, field degree is {}",
                coeffs.len(),
                self.arith.degree
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.params.p) {
            return Err(Error::Format(format!("coefficient {c} is not a residue mod {}", self.params.p)));
        }
        let mut d = [0u64; MAX_DEGREE];
        d[..coeffs.len()].copy_from_slice(coeffs);
        Ok(FieldElt(self.arith.pack(&d)))
    }

    #[inline]
    fn log(&self, t: &ZechTables, a: FieldElt) -> u32 {
        t.log[a.0 as usize]
    }

    /// Discrete log to base `g`, `None` for zero.
    pub fn dlog(&self, a: FieldElt) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        match &self.tables {
            Some(t) => Some(self.log(t, a) as u64),
            None => None,
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElt, b: FieldElt) -> FieldElt {
        if self.params.p == 2 {
            return FieldElt(a.0 ^ b.0);
        }
        if let Some(t) = &self.tables {
            if a.is_zero() {
                return b;
            }
            if b.is_zero() {
                return a;
            }
            let m = self.arith.order - 1;
            let (la, lb) = (self.log(t, a) as u64, self.log(t, b) as u64);
            let k = (lb + m - la) % m;
            let z = t.zech[k as usize];
            if z == NO_LOG {
                return FieldElt::ZERO;
            }
            return FieldElt(t.exp[(la + z as u64) as usize] as u64);
        }
        FieldElt(self.arith.add(a.0, b.0))
    }

    pub fn neg(&self, a: FieldElt) -> FieldElt {
        FieldElt(self.arith.neg(a.0))
    }

    pub fn sub(&self, a: FieldElt, b: FieldElt) -> FieldElt {
        self.add(a, self.neg(b))
    }

    /// Multiply by the prime-field scalar `c mod p`.
    pub fn scale(&self, a: FieldElt, c: u64) -> FieldElt {
        FieldElt(self.arith.scale(a.0, c))
    }

    #[inline]
    pub fn mul(&self, a: FieldElt, b: FieldElt) -> FieldElt {
        if a.is_zero() || b.is_zero() {
            return FieldElt::ZERO;
        }
        if let Some(t) = &self.tables {
            let s = self.log(t, a) as usize + self.log(t, b) as usize;
            return FieldElt(t.exp[s] as u64);
        }
        FieldElt(self.arith.mul(a.0, b.0))
    }

    pub fn inv(&self, a: FieldElt) -> Result<FieldElt> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let m = self.arith.order - 1;
        if let Some(t) = &self.tables {
            let la = self.log(t, a) as u64;
            return Ok(FieldElt(t.exp[((m - la) % m) as usize] as u64));
        }
        Ok(self.pow(a, (m - 1) as u128))
    }

    pub fn div(&self, a: FieldElt, b: FieldElt) -> Result<FieldElt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply (or a table lookup).
    pub fn pow(&self, a: FieldElt, e: u128) -> FieldElt {
        if e == 0 {
            return FieldElt::ONE;
        }
        if a.is_zero() {
            return FieldElt::ZERO;
        }
        let m = (self.arith.order - 1) as u128;
        let e = e % m;
        if let Some(t) = &self.tables {
            let la = self.log(t, a) as u128;
            return FieldElt(t.exp[(la * e % m) as usize] as u64);
        }
        FieldElt(self.arith.pow(a.0, e))
    }

    /// `a^e` for an arbitrary-precision exponent.
    pub fn pow_big(&self, a: FieldElt, e: &BigUint) -> FieldElt {
        if e.is_zero() {
            return FieldElt::ONE;
        }
        if a.is_zero() {
            return FieldElt::ZERO;
        }
        let m = BigUint::from(self.arith.order - 1);
        let r = (e % &m).to_u128().unwrap_or(0);
        self.pow(a, r)
    }

    /// `a^{p^i}`; `i` is taken modulo the field degree, so negative values
    /// give inverse Frobenius powers.
    #[inline]
    pub fn frobenius(&self, a: FieldElt, i: i64) -> FieldElt {
        let deg = self.arith.degree as i64;
        let i = i.rem_euclid(deg) as usize;
        if i == 0 || a.is_zero() {
            return a;
        }
        if let Some(t) = &self.tables {
            let m = (self.arith.order - 1) as u128;
            let pi = (self.params.p as u128).pow(i as u32) % m;
            let la = self.log(t, a) as u128;
            return FieldElt(t.exp[(la * pi % m) as usize] as u64);
        }
        FieldElt(self.frob[i].apply(&self.arith, a.0))
    }

    /// Whether `a` lies in the subfield `F_{p^degree}`.
    pub fn in_subfield(&self, a: FieldElt, degree: u32) -> Result<bool> {
        self.check_divides(degree, self.degree())?;
        Ok(self.frobenius(a, degree as i64) == a)
    }

    fn check_divides(&self, sub: u32, ambient: u32) -> Result<()> {
        if sub == 0 || ambient % sub != 0 {
            return Err(Error::DegreeMismatch { sub, ambient });
        }
        Ok(())
    }

    /// Relative trace `Tr_{F_{p^src}/F_{p^dst}}(a)` for `a ∈ F_{p^src}`.
    pub fn trace(&self, a: FieldElt, src: u32, dst: u32) -> Result<FieldElt> {
        self.check_divides(src, self.degree())?;
        self.check_divides(dst, src)?;
        if !self.in_subfield(a, src)? {
            return Err(Error::NotInSubfield(src));
        }
        Ok((0..src / dst).fold(FieldElt::ZERO, |acc, i| self.add(acc, self.frobenius(a, (dst * i) as i64))))
    }

    /// `Tr_{F_{q^{2n}}/F_{q^2}}`, through a precomputed linear map.
    #[inline]
    pub fn trace_to_fq2(&self, a: FieldElt) -> FieldElt {
        FieldElt(self.trace_fq2.apply(&self.arith, a.0))
    }

    /// A generator of `F_{p^degree}^*`.
    pub fn subfield_generator(&self, degree: u32) -> Result<FieldElt> {
        self.check_divides(degree, self.degree())?;
        let m = self.arith.order - 1;
        let sub = self.params.p.pow(degree) - 1;
        Ok(self.pow(self.g, (m / sub) as u128))
    }

    /// All elements of `F_{p^degree}`, zero first, then powers of the
    /// subfield generator.
    pub fn subfield_elements(&self, degree: u32) -> Result<Vec<FieldElt>> {
        let h = self.subfield_generator(degree)?;
        let size = self.params.p.pow(degree) - 1;
        let mut out = Vec::with_capacity(size as usize + 1);
        out.push(FieldElt::ZERO);
        let mut x = FieldElt::ONE;
        for _ in 0..size {
            out.push(x);
            x = self.mul(x, h);
        }
        Ok(out)
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElt) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let mut ord = self.arith.order - 1;
        for &r in &self.group_factors {
            while ord % r == 0 && self.pow(a, (ord / r) as u128) == FieldElt::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// `ω^e` (exponent taken mod `q^n+1`).
    #[inline]
    pub fn omega_pow(&self, e: u64) -> FieldElt {
        let singer = self.singer_order();
        if !self.omega_powers.is_empty() {
            return self.omega_powers[(e % singer) as usize];
        }
        self.pow(self.omega, (e % singer) as u128)
    }

    /// `log_ω(x)` in `[0, q^n]` when `x ∈ ⟨ω⟩`.
    pub fn omega_log(&self, x: FieldElt) -> Option<u64> {
        if x.is_zero() {
            return None;
        }
        if let Some(t) = &self.tables {
            let step = (self.arith.order - 1) / self.singer_order();
            let l = self.log(t, x) as u64;
            return (l % step == 0).then_some(l / step);
        }
        if let Some(map) = &self.omega_log {
            return map.get(&x.0).map(|&l| l as u64);
        }
        // Fallback for very large Singer groups: baby-step giant-step.
        self.omega_log_bsgs(x)
    }

    fn omega_log_bsgs(&self, x: FieldElt) -> Option<u64> {
        let singer = self.singer_order();
        if self.pow(x, singer as u128) != FieldElt::ONE {
            return None;
        }
        let m = (singer as f64).sqrt().ceil() as u64;
        let mut baby = HashMap::with_capacity(m as usize);
        let mut w = FieldElt::ONE;
        for j in 0..m {
            baby.entry(w.0).or_insert(j);
            w = self.mul(w, self.omega);
        }
        let giant = self.inv(w).ok()?;
        let mut y = x;
        for i in 0..=m {
            if let Some(&j) = baby.get(&y.0) {
                return Some((i * m + j) % singer);
            }
            y = self.mul(y, giant);
        }
        None
    }

    /// Whether a nonzero element is a square (always true in characteristic 2).
    pub fn is_square(&self, a: FieldElt) -> bool {
        if self.params.p == 2 || a.is_zero() {
            return true;
        }
        if let Some(t) = &self.tables {
            return self.log(t, a) % 2 == 0;
        }
        self.pow(a, ((self.arith.order - 1) / 2) as u128) == FieldElt::ONE
    }

    /// Write `x ≠ 0` as `f · ω^i · ω₀^eps` with `f ∈ F_{q^n}^*`, least `i`.
    pub fn coset_decompose(&self, x: FieldElt) -> Result<CosetDecomposition> {
        if x.is_zero() {
            return Err(Error::Precondition("cannot decompose zero".into()));
        }
        let singer = self.singer_order();
        let qn = singer - 1;
        let (z, eps) = if !self.is_square(x) {
            (self.div(x, self.omega0)?, 1u8)
        } else {
            (x, 0u8)
        };
        // z^{q^n - 1} = ω^{-2i}
        let t = self.pow(z, (qn - 1) as u128);
        let l = self
            .omega_log(t)
            .ok_or_else(|| Error::Consistency("z^(q^n-1) outside <ω>".into()))?;
        let neg_l = (singer - l) % singer;
        let i = if self.params.p == 2 {
            let half = (singer + 1) / 2;
            ((neg_l as u128 * half as u128) % singer as u128) as u64
        } else {
            if neg_l % 2 != 0 {
                return Err(Error::Consistency("odd exponent in coset decomposition".into()));
            }
            neg_l / 2
        };
        let f = self.mul(z, self.omega_pow(singer - i % singer));
        if !self.in_subfield(f, self.params.n * self.params.d)? {
            return Err(Error::Consistency("coset factor not in F_{q^n}".into()));
        }
        Ok(CosetDecomposition { f, i: i % singer, eps })
    }

    /// Evaluate a polynomial over `F_p` (ascending coefficients) at `x`.
    pub fn eval_poly(&self, coeffs: &[u64], x: FieldElt) -> FieldElt {
        coeffs
            .iter()
            .rev()
            .fold(FieldElt::ZERO, |acc, &c| self.add(self.mul(acc, x), self.scalar(c)))
    }

    /// The root of an irreducible polynomial over `F_p` with least encoding.
    pub fn embed_root(&self, minpoly: &[u64]) -> Result<FieldElt> {
        let deg = minpoly
            .iter()
            .rposition(|&c| c % self.params.p != 0)
            .ok_or_else(|| Error::NoRoot("zero polynomial".into()))? as u32;
        if deg == 0 {
            return Err(Error::NoRoot("constant polynomial".into()));
        }
        if self.degree() % deg != 0 {
            return Err(Error::NoRoot(format!("degree {deg} does not divide {}", self.degree())));
        }
        let root = self
            .subfield_elements(deg)?
            .into_iter()
            .find(|&x| self.eval_poly(minpoly, x).is_zero())
            .ok_or_else(|| Error::NoRoot("polynomial has no root".into()))?;
        let mut conjugates: Vec<FieldElt> = (0..deg).map(|i| self.frobenius(root, i as i64)).collect();
        conjugates.sort_unstable();
        conjugates.dedup();
        if conjugates.len() != deg as usize {
            return Err(Error::NoRoot("polynomial is reducible".into()));
        }
        Ok(conjugates[0])
    }

}

fn build_tables(arith: &PolyArith, g: u64) -> ZechTables {
    let order = arith.order as usize;
    let m = order - 1;
    let mut log = vec![NO_LOG; order];
    let mut exp = vec![0u32; 2 * m];
    let mut x = 1u64;
    for k in 0..m {
        exp[k] = x as u32;
        exp[k + m] = x as u32;
        log[x as usize] = k as u32;
        x = arith.mul(x, g);
    }
    let zech = if arith.p == 2 {
        Vec::new()
    } else {
        let p = arith.p;
        (0..m)
            .map(|k| {
                let e = exp[k] as u64;
                let c0 = e % p;
                let sum = e - c0 + (c0 + 1) % p;
                if sum == 0 {
                    NO_LOG
                } else {
                    log[sum as usize]
                }
            })
            .collect()
    };
    ZechTables { log, exp, zech }
}
