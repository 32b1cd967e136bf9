//! The finite field F_q for prime powers q <= 64.
//!
//! Elements are polynomials over F_p modulo a fixed monic irreducible of
//! degree f (q = p^f), packed into the integer sum(c_i * p^i).  The modulus
//! is the irreducible whose packed non-leading part is smallest, so every
//! run of the program agrees on the representation.  The distinguished
//! generator is the smallest packed representative of a multiplicative
//! generator; discrete logarithms are taken to that base.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

/// Largest supported field size; tables are dense and precomputed.
pub const MAX_Q: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("q must be a prime power with 2 <= q <= {MAX_Q}, got {0}")]
    BadOrder(u32),
    #[error("value {value} out of range for F_{q}")]
    BadValue { q: u32, value: u32 },
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
}

/// Splits q into (p, f) with q = p^f, p prime; None if q is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut f = 0;
            while rest % p == 0 {
                rest /= p;
                f += 1;
            }
            return if rest == 1 { Some((p, f)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

/// Dense arithmetic tables for one field, built once and leaked.
pub struct FqTables {
    pub q: u32,
    pub p: u32,
    pub f: u32,
    /// Non-leading coefficients of the modulus, little-endian, length f.
    pub modulus: Vec<u32>,
    /// Packed representative of the distinguished generator.
    pub generator: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    /// dlog[x] = k with generator^k = x, for x != 0; dlog[0] unused.
    dlog: Vec<u32>,
    /// pow[k] = generator^k for 0 <= k < q-1.
    pow: Vec<u16>,
}

fn registry() -> &'static Mutex<HashMap<u32, &'static FqTables>> {
    static REGISTRY: OnceLock<Mutex<HashMap<u32, &'static FqTables>>> = OnceLock::new();
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn tables(q: u32) -> Result<&'static FqTables, FieldError> {
    let mut map = registry().lock().expect("field table registry poisoned");
    if let Some(t) = map.get(&q) {
        return Ok(t);
    }
    let built: &'static FqTables = Box::leak(Box::new(build_tables(q)?));
    map.insert(q, built);
    Ok(built)
}

// Polynomials over F_p: little-endian coefficient vectors, no trailing zeros.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

/// Remainder of a modulo monic g.
fn poly_rem(a: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    debug_assert_eq!(*g.last().unwrap(), 1, "modulus must be monic");
    let mut a = a.to_vec();
    while a.len() >= g.len() {
        let lead = *a.last().unwrap();
        let shift = a.len() - g.len();
        if lead != 0 {
            for (i, &c) in g.iter().enumerate() {
                let idx = shift + i;
                a[idx] = (a[idx] + p - lead * c % p) % p;
            }
        }
        a.pop();
        a = poly_trim(a);
        if a.len() < g.len() {
            break;
        }
    }
    poly_trim(a)
}

fn poly_pow_mod(base: &[u32], mut e: u64, g: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut acc = poly_rem(base, g, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &acc, p), g, p);
        }
        acc = poly_rem(&poly_mul(&acc, &acc, p), g, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        // Make b monic before taking remainders.
        let lead = *b.last().unwrap();
        let lead_inv = mod_inverse(lead, p);
        let monic: Vec<u32> = b.iter().map(|&c| c * lead_inv % p).collect();
        let r = poly_rem(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is a small prime; Fermat.
    let mut result = 1u64;
    let mut acc = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * acc % p as u64;
        }
        acc = acc * acc % p as u64;
        e >>= 1;
    }
    result as u32
}

fn primes_dividing(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Monic degree-f polynomial with the given packed non-leading part.
fn candidate_poly(packed: u32, p: u32, f: u32) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(f as usize + 1);
    let mut v = packed;
    for _ in 0..f {
        coeffs.push(v % p);
        v /= p;
    }
    coeffs.push(1);
    coeffs
}

fn is_irreducible(g: &[u32], p: u32) -> bool {
    let f = (g.len() - 1) as u32;
    let x = vec![0u32, 1];
    // x^(p^f) == x mod g, and x^(p^(f/l)) - x coprime to g for prime l | f.
    let mut frob = x.clone();
    let mut powers = Vec::with_capacity(f as usize + 1);
    powers.push(frob.clone());
    for _ in 0..f {
        frob = poly_pow_mod(&frob, p as u64, g, p);
        powers.push(frob.clone());
    }
    let mut top = powers[f as usize].clone();
    poly_sub_in_place(&mut top, &x, p);
    if !poly_trim(top).is_empty() {
        return false;
    }
    for l in primes_dividing(f) {
        let mut diff = powers[(f / l) as usize].clone();
        poly_sub_in_place(&mut diff, &x, p);
        let diff = poly_trim(diff);
        if diff.is_empty() {
            return false;
        }
        let g1 = poly_gcd(g, &diff, p);
        if g1.len() > 1 {
            return false;
        }
    }
    true
}

fn poly_sub_in_place(a: &mut Vec<u32>, b: &[u32], p: u32) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (i, &c) in b.iter().enumerate() {
        a[i] = (a[i] + p - c) % p;
    }
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn unpack(mut v: u32, p: u32, f: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(f as usize);
    for _ in 0..f {
        out.push(v % p);
        v /= p;
    }
    out
}

fn build_tables(q: u32) -> Result<FqTables, FieldError> {
    if q > MAX_Q {
        return Err(FieldError::BadOrder(q));
    }
    let (p, f) = prime_power(q).ok_or(FieldError::BadOrder(q))?;
    let modulus_full = if f == 1 {
        vec![0, 1]
    } else {
        (0..q)
            .map(|packed| candidate_poly(packed, p, f))
            .find(|g| is_irreducible(g, p))
            .expect("an irreducible of every degree exists over F_p")
    };
    let modulus: Vec<u32> = modulus_full[..f as usize].to_vec();

    let n = q as usize;
    let mut add = vec![0u16; n * n];
    let mut mul = vec![0u16; n * n];
    let mut neg = vec![0u16; n];
    for x in 0..n {
        let xp = unpack(x as u32, p, f);
        let negp: Vec<u32> = xp.iter().map(|&c| (p - c) % p).collect();
        neg[x] = pack(&negp, p) as u16;
        for y in 0..n {
            let yp = unpack(y as u32, p, f);
            let sum: Vec<u32> = xp.iter().zip(&yp).map(|(&a, &b)| (a + b) % p).collect();
            add[x * n + y] = pack(&sum, p) as u16;
            let prod = poly_rem(&poly_mul(&poly_trim(xp.clone()), &poly_trim(yp), p), &modulus_full, p);
            let mut padded = prod;
            padded.resize(f as usize, 0);
            mul[x * n + y] = pack(&padded, p) as u16;
        }
    }

    let order = |x: u32| -> u32 {
        let mut acc = x;
        let mut k = 1;
        while acc != 1 {
            acc = mul[(acc as usize) * n + x as usize] as u32;
            k += 1;
        }
        k
    };
    let generator = (1..q)
        .find(|&x| order(x) == q - 1)
        .expect("F_q has a multiplicative generator");

    let mut pow = vec![0u16; (q - 1) as usize];
    let mut dlog = vec![0u32; n];
    let mut acc = 1u32;
    for (k, slot) in pow.iter_mut().enumerate() {
        *slot = acc as u16;
        dlog[acc as usize] = k as u32;
        acc = mul[(acc as usize) * n + generator as usize] as u32;
    }
    debug_assert_eq!(acc, 1, "generator order must be q - 1");

    let mut inv = vec![0u16; n];
    for x in 1..n {
        let k = dlog[x];
        inv[x] = pow[((q - 1 - k) % (q - 1)) as usize];
    }

    Ok(FqTables { q, p, f, modulus, generator, add, mul, neg, inv, dlog, pow })
}

/// An element of F_q, carrying its field order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqElement {
    q: u32,
    repr: u32,
}

impl FqElement {
    pub fn new(q: u32, repr: u32) -> Result<Self, FieldError> {
        let t = tables(q)?;
        if repr >= t.q {
            return Err(FieldError::BadValue { q, value: repr });
        }
        Ok(FqElement { q, repr })
    }

    pub fn zero(q: u32) -> Result<Self, FieldError> {
        Self::new(q, 0)
    }

    pub fn one(q: u32) -> Result<Self, FieldError> {
        tables(q)?;
        Ok(FqElement { q, repr: if q >= 2 { 1 } else { 0 } })
    }

    /// The canonical image of an integer through the prime subfield.
    pub fn from_int(q: u32, v: i64) -> Result<Self, FieldError> {
        let t = tables(q)?;
        let p = t.p as i64;
        Ok(FqElement { q, repr: v.rem_euclid(p) as u32 })
    }

    pub fn generator(q: u32) -> Result<Self, FieldError> {
        let t = tables(q)?;
        Ok(FqElement { q, repr: t.generator })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn repr(&self) -> u32 {
        self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.repr == 0
    }

    fn t(&self) -> &'static FqTables {
        tables(self.q).expect("tables exist for constructed elements")
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.repr == 0 {
            return Err(FieldError::DivisionByZero(self.q));
        }
        Ok(FqElement { q: self.q, repr: self.t().inv[self.repr as usize] as u32 })
    }

    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        if self.repr == 0 {
            if e < 0 {
                return Err(FieldError::DivisionByZero(self.q));
            }
            return Ok(if e == 0 { Self::one(self.q)? } else { *self });
        }
        let k = self.dlog().expect("nonzero element has a dlog") as i64;
        let n = (self.q - 1) as i64;
        let exp = (k * e.rem_euclid(n)).rem_euclid(n) as usize;
        Ok(FqElement { q: self.q, repr: self.t().pow[exp] as u32 })
    }

    /// Discrete log to the distinguished generator; None for zero.
    pub fn dlog(&self) -> Option<u32> {
        if self.repr == 0 {
            None
        } else {
            Some(self.t().dlog[self.repr as usize])
        }
    }

    /// generator^k.
    pub fn generator_pow(q: u32, k: i64) -> Result<Self, FieldError> {
        let t = tables(q)?;
        if q == 2 {
            return Self::one(q);
        }
        let exp = k.rem_euclid((q - 1) as i64) as usize;
        Ok(FqElement { q, repr: t.pow[exp] as u32 })
    }

    /// All elements of the field in packed order (zero first).
    pub fn all(q: u32) -> Result<Vec<Self>, FieldError> {
        tables(q)?;
        Ok((0..q).map(|repr| FqElement { q, repr }).collect())
    }

    /// All nonzero elements in generator-power order: g^0, g^1, ...
    pub fn units(q: u32) -> Result<Vec<Self>, FieldError> {
        let t = tables(q)?;
        Ok(t.pow.iter().map(|&repr| FqElement { q, repr: repr as u32 }).collect())
    }
}

impl std::fmt::Debug for FqElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}#F{}", self.repr, self.q)
    }
}

impl std::fmt::Display for FqElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.repr)
    }
}

impl std::ops::Add for FqElement {
    type Output = FqElement;
    fn add(self, rhs: FqElement) -> FqElement {
        assert_eq!(self.q, rhs.q, "field order mismatch");
        let n = self.q as usize;
        FqElement { q: self.q, repr: self.t().add[self.repr as usize * n + rhs.repr as usize] as u32 }
    }
}

impl std::ops::Sub for FqElement {
    type Output = FqElement;
    fn sub(self, rhs: FqElement) -> FqElement {
        self + (-rhs)
    }
}

impl std::ops::Neg for FqElement {
    type Output = FqElement;
    fn neg(self) -> FqElement {
        FqElement { q: self.q, repr: self.t().neg[self.repr as usize] as u32 }
    }
}

impl std::ops::Mul for FqElement {
    type Output = FqElement;
    fn mul(self, rhs: FqElement) -> FqElement {
        assert_eq!(self.q, rhs.q, "field order mismatch");
        let n = self.q as usize;
        FqElement { q: self.q, repr: self.t().mul[self.repr as usize * n + rhs.repr as usize] as u32 }
    }
}
