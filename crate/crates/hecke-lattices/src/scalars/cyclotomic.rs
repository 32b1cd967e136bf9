//! Rational polynomials in a primitive n-th root of unity zeta, reduced
//! modulo the n-th cyclotomic polynomial.
//!
//! Coefficients are 64-bit rationals.  All denominators that ever appear in
//! this crate are powers of a single prime (inverting q never introduces
//! anything else), so integrality is simply "denominator one" after the
//! automatic gcd reduction.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

/// Euler phi, by trial factorization; n is tiny here (n <= 63).
pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            result = result / p * (p - 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        result = result / m * (m - 1);
    }
    result
}

/// Exact division of integer polynomials, little-endian, monic divisor.
fn poly_div_exact(mut num: Vec<i64>, den: &[i64]) -> Vec<i64> {
    assert_eq!(*den.last().unwrap(), 1, "divisor must be monic");
    let mut quo = vec![0i64; num.len() - den.len() + 1];
    for k in (0..quo.len()).rev() {
        let lead = num[k + den.len() - 1];
        quo[k] = lead;
        for (i, &c) in den.iter().enumerate() {
            num[k + i] -= lead * c;
        }
    }
    assert!(num.iter().all(|&c| c == 0), "division must be exact");
    quo
}

/// The n-th cyclotomic polynomial, little-endian integer coefficients.
pub fn cyclotomic_polynomial(n: u32) -> &'static [i64] {
    static CACHE: OnceLock<Mutex<HashMap<u32, &'static [i64]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let map = cache.lock().expect("cyclotomic cache poisoned");
        if let Some(p) = map.get(&n) {
            return p;
        }
    }
    // x^n - 1 divided by the product of all proper-divisor cyclotomics.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut result = num;
    for d in 1..n {
        if n % d == 0 {
            result = poly_div_exact(result, cyclotomic_polynomial(d));
        }
    }
    let leaked: &'static [i64] = Box::leak(result.into_boxed_slice());
    let mut map = cache.lock().expect("cyclotomic cache poisoned");
    map.insert(n, leaked);
    leaked
}

/// An element of Q[zeta_n] represented by its coefficients on
/// 1, zeta, ..., zeta^(phi(n)-1).
#[derive(Clone, PartialEq, Eq)]
pub struct CycPoly {
    n: u32,
    coeffs: Vec<Rational64>,
}

impl CycPoly {
    pub fn zero(n: u32) -> Self {
        CycPoly { n, coeffs: vec![Rational64::zero(); euler_phi(n) as usize] }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rational(n, Rational64::one())
    }

    pub fn from_rational(n: u32, c: Rational64) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = c;
        z
    }

    pub fn from_int(n: u32, c: i64) -> Self {
        Self::from_rational(n, Rational64::from_integer(c))
    }

    /// zeta^k, k taken modulo n.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        let e = k.rem_euclid(n as i64) as usize;
        let mut raw = vec![Rational64::zero(); e + 1];
        raw[e] = Rational64::one();
        Self::reduce(n, raw)
    }

    fn reduce(n: u32, mut raw: Vec<Rational64>) -> Self {
        let modulus = cyclotomic_polynomial(n);
        let deg = modulus.len() - 1;
        while raw.len() > deg {
            let lead = raw.pop().unwrap();
            if !lead.is_zero() {
                let shift = raw.len() - deg;
                for (i, &c) in modulus[..deg].iter().enumerate() {
                    raw[shift + i] -= lead * Rational64::from_integer(c);
                }
            }
        }
        raw.resize(deg, Rational64::zero());
        CycPoly { n, coeffs: raw }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    pub fn scale(&self, c: Rational64) -> Self {
        CycPoly { n: self.n, coeffs: self.coeffs.iter().map(|&x| x * c).collect() }
    }

    /// Minimum p-adic valuation over nonzero coefficients; None when zero.
    /// This bounds the valuation of the element from below.
    pub fn min_coeff_valuation(&self, p: i64) -> Option<i64> {
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| int_valuation(*c.numer(), p) - int_valuation(*c.denom(), p))
            .min()
    }
}

fn int_valuation(x: i64, p: i64) -> i64 {
    let mut x = x.abs();
    debug_assert!(x > 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

impl std::ops::Add for &CycPoly {
    type Output = CycPoly;
    fn add(self, rhs: &CycPoly) -> CycPoly {
        assert_eq!(self.n, rhs.n, "root-of-unity order mismatch");
        CycPoly {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &CycPoly {
    type Output = CycPoly;
    fn sub(self, rhs: &CycPoly) -> CycPoly {
        assert_eq!(self.n, rhs.n, "root-of-unity order mismatch");
        CycPoly {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl std::ops::Neg for &CycPoly {
    type Output = CycPoly;
    fn neg(self) -> CycPoly {
        CycPoly { n: self.n, coeffs: self.coeffs.iter().map(|&a| -a).collect() }
    }
}

impl std::ops::Mul for &CycPoly {
    type Output = CycPoly;
    fn mul(self, rhs: &CycPoly) -> CycPoly {
        assert_eq!(self.n, rhs.n, "root-of-unity order mismatch");
        let mut raw = vec![Rational64::zero(); self.coeffs.len() + rhs.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                raw[i + j] += a * b;
            }
        }
        CycPoly::reduce(self.n, raw)
    }
}

fn fmt_term(f: &mut std::fmt::Formatter<'_>, c: Rational64, power: usize, first: bool) -> std::fmt::Result {
    let mag = c.abs();
    if first {
        if c.is_negative() {
            write!(f, "-")?;
        }
    } else if c.is_negative() {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let coeff = if mag.denom().is_one() {
        if mag.numer().is_one() && power > 0 { String::new() } else { format!("{}", mag.numer()) }
    } else {
        format!("({}/{})", mag.numer(), mag.denom())
    };
    match power {
        0 => write!(f, "{}", if coeff.is_empty() { "1".to_string() } else { coeff }),
        1 => write!(f, "{coeff}z"),
        _ => write!(f, "{coeff}z^{power}"),
    }
}

impl std::fmt::Display for CycPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            fmt_term(f, c, power, first)?;
            first = false;
        }
        Ok(())
    }
}

impl std::fmt::Debug for CycPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CycPoly(n={}, {})", self.n, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(n: u32, k: i64) -> CycPoly {
        CycPoly::zeta_pow(n, k)
    }

    #[test]
    fn cyclotomic_polynomial_examples() {
        assert_eq!(cyclotomic_polynomial(1), &[-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), &[1, 1]);
        assert_eq!(cyclotomic_polynomial(3), &[1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), &[1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), &[1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), &[1, 0, -1, 0, 1]);
    }

    #[test]
    fn euler_phi_examples() {
        let values: Vec<u32> = (1..=12).map(euler_phi).collect();
        assert_eq!(values, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn zeta_has_exact_order_n() {
        for n in [1u32, 2, 3, 4, 6, 8, 12] {
            assert_eq!(zp(n, n as i64), CycPoly::one(n), "zeta^n = 1 at n={n}");
            for k in 1..n {
                assert_ne!(zp(n, k as i64), CycPoly::one(n), "zeta^{k} != 1 at n={n}");
            }
        }
    }

    #[test]
    fn power_sum_vanishes_unless_exponent_divisible() {
        // sum_{k=0}^{n-1} zeta^{jk} is n for n | j and 0 otherwise.
        for n in [2u32, 3, 4, 6] {
            for j in 0..(2 * n as i64) {
                let mut sum = CycPoly::zero(n);
                for k in 0..n as i64 {
                    sum = &sum + &zp(n, j * k);
                }
                if j % n as i64 == 0 {
                    assert_eq!(sum, CycPoly::from_int(n, n as i64), "n={n} j={j}");
                } else {
                    assert!(sum.is_zero(), "n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn ring_ops_respect_the_modulus() {
        // In Q[zeta_3]: zeta^2 = -1 - zeta.
        let z2 = zp(3, 2);
        let expected = &(-&CycPoly::one(3)) - &zp(3, 1);
        assert_eq!(z2, expected);
        // zeta * zeta^2 = 1.
        assert_eq!(&zp(3, 1) * &zp(3, 2), CycPoly::one(3));
    }

    #[test]
    fn integrality_and_valuation() {
        let a = CycPoly::from_rational(4, Rational64::new(3, 4));
        assert!(!a.is_integral());
        assert_eq!(a.min_coeff_valuation(2), Some(-2));
        let b = CycPoly::from_int(4, 12);
        assert!(b.is_integral());
        assert_eq!(b.min_coeff_valuation(2), Some(2));
        assert_eq!(b.min_coeff_valuation(3), Some(1));
        assert_eq!(CycPoly::zero(4).min_coeff_valuation(2), None);
    }

    #[test]
    fn display_is_readable() {
        let x = &CycPoly::from_int(3, 2) + &zp(3, 1).scale(Rational64::new(-1, 3));
        assert_eq!(format!("{x}"), "2 - (1/3)z");
    }
}
