//! The coefficient ring for operator matrices: polynomials in a uniformizer
//! pi with pi^r = q, coefficients in Q(zeta) for a primitive (q-1)-th root
//! of unity zeta, denominators only powers of p.
//!
//! A scalar is stored as (a_0, ..., a_{r-1}) meaning sum a_i pi^i; products
//! whose pi-degree reaches r fold back with a factor of q.  Integral scalars
//! (no denominators) reduce modulo (p, pi, zeta - g) to the field F_q, where
//! g is the distinguished generator of F_q^x.

pub mod cyclotomic;
pub mod fq;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, CycPoly};
pub use fq::{prime_power, FieldError, FqElement, MAX_Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("amplitude must be positive, got {0}")]
    BadAmplitude(i64),
    #[error("scalar parameter mismatch: ({0}) vs ({1})")]
    ParamMismatch(String, String),
    #[error("scalar is not integral: {0}")]
    NotIntegral(String),
}

/// Shared parameters (q, r) with the derived prime decomposition q = p^f.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScalarParams {
    q: u32,
    r: u32,
    p: u32,
    f: u32,
}

impl ScalarParams {
    pub fn new(q: u32, r: i64) -> Result<Self, ScalarError> {
        if r < 1 {
            return Err(ScalarError::BadAmplitude(r));
        }
        let t = fq::tables(q)?;
        Ok(ScalarParams { q, r: r as u32, p: t.p, f: t.f })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    /// Order of zeta: q - 1 (which is 1 when q = 2, so zeta = 1 there).
    pub fn zeta_order(&self) -> u32 {
        self.q - 1
    }
}

impl std::fmt::Debug for ScalarParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(q={}, r={})", self.q, self.r)
    }
}

impl std::fmt::Display for ScalarParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q={}, r={}", self.q, self.r)
    }
}

/// An element of Q(zeta)[pi] / (pi^r - q).
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    params: ScalarParams,
    parts: Vec<CycPoly>,
}

impl Scalar {
    pub fn zero(params: ScalarParams) -> Self {
        let n = params.zeta_order();
        Scalar { params, parts: (0..params.r).map(|_| CycPoly::zero(n)).collect() }
    }

    pub fn one(params: ScalarParams) -> Self {
        Self::from_int(params, 1)
    }

    pub fn from_int(params: ScalarParams, v: i64) -> Self {
        Self::from_rational(params, Rational64::from_integer(v))
    }

    pub fn from_rational(params: ScalarParams, v: Rational64) -> Self {
        let mut s = Self::zero(params);
        s.parts[0] = CycPoly::from_rational(params.zeta_order(), v);
        s
    }

    pub fn from_cyc(params: ScalarParams, c: CycPoly) -> Self {
        assert_eq!(c.n(), params.zeta_order(), "root-of-unity order mismatch");
        let mut s = Self::zero(params);
        s.parts[0] = c;
        s
    }

    /// zeta^e.
    pub fn zeta_pow(params: ScalarParams, e: i64) -> Self {
        Self::from_cyc(params, CycPoly::zeta_pow(params.zeta_order(), e))
    }

    /// c * zeta^{zeta_exp} * pi^{pi_exp}, any integer exponents.
    /// pi^{pi_exp} is normalized to q^k pi^j with 0 <= j < r.
    pub fn monomial(params: ScalarParams, zeta_exp: i64, pi_exp: i64) -> Self {
        let r = params.r as i64;
        let j = pi_exp.rem_euclid(r) as usize;
        let k = (pi_exp - j as i64) / r;
        let coeff = q_power(params.q, k);
        let mut s = Self::zero(params);
        s.parts[j] = CycPoly::zeta_pow(params.zeta_order(), zeta_exp).scale(coeff);
        s
    }

    /// The canonical unit lift of x: zeta^dlog(x), and 0 for x = 0.
    pub fn teichmuller(params: ScalarParams, x: FqElement) -> Self {
        assert_eq!(x.q(), params.q, "field order mismatch");
        match x.dlog() {
            None => Self::zero(params),
            Some(k) => Self::zeta_pow(params, k as i64),
        }
    }

    pub fn params(&self) -> ScalarParams {
        self.params
    }

    pub fn parts(&self) -> &[CycPoly] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|a| a.is_zero())
    }

    /// True when no denominator appears anywhere.  Denominators in this ring
    /// are always powers of p, so this is exactly p-integrality.
    pub fn is_integral(&self) -> bool {
        self.parts.iter().all(|a| a.is_integral())
    }

    /// Lower bound for the pi-adic valuation: min over i of
    /// i + floor(r * v_p(a_i) / f), using the coefficient-minimum bound for
    /// v_p(a_i).  Exact when each nonzero a_i is a monomial in zeta; None
    /// for the zero scalar.
    pub fn valuation_floor(&self) -> Option<i64> {
        let r = self.params.r as i64;
        let f = self.params.f as i64;
        self.parts
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                a.min_coeff_valuation(self.params.p as i64)
                    .map(|vp| i as i64 + (r * vp).div_euclid(f))
            })
            .min()
    }

    /// Image in F_q under pi -> 0, zeta -> g, for integral scalars.
    pub fn reduce_mod_pi(&self) -> Result<FqElement, ScalarError> {
        if !self.is_integral() {
            return Err(ScalarError::NotIntegral(format!("{self}")));
        }
        let q = self.params.q;
        let g = FqElement::generator(q)?;
        let mut acc = FqElement::zero(q)?;
        for (j, c) in self.parts[0].coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let lift = FqElement::from_int(q, *c.numer())?;
            acc = acc + lift * g.pow(j as i64)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: Rational64) -> Self {
        Scalar { params: self.params, parts: self.parts.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn times_q_pow(&self, k: i64) -> Self {
        self.scale(q_power(self.params.q, k))
    }

    fn assert_same_params(&self, rhs: &Scalar) {
        assert_eq!(self.params, rhs.params, "scalar parameter mismatch");
    }
}

/// q^k as a rational, for either sign of k.
pub fn q_power(q: u32, k: i64) -> Rational64 {
    let mag = (q as i64).checked_pow(k.unsigned_abs() as u32).expect("q-power overflow");
    if k >= 0 {
        Rational64::from_integer(mag)
    } else {
        Rational64::new(1, mag)
    }
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.assert_same_params(rhs);
        Scalar {
            params: self.params,
            parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.assert_same_params(rhs);
        Scalar {
            params: self.params,
            parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { params: self.params, parts: self.parts.iter().map(|a| -a).collect() }
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.assert_same_params(rhs);
        let r = self.params.r as usize;
        let mut out = Scalar::zero(self.params);
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.parts.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                let (slot, carry) = ((i + j) % r, (i + j) / r);
                let folded =
                    if carry == 0 { prod } else { prod.scale(q_power(self.params.q, carry as i64)) };
                out.parts[slot] = &out.parts[slot] + &folded;
            }
        }
        out
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})pi")?,
                _ => write!(f, "({a})pi^{i}")?,
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Scalar[{:?}]({})", self.params, self)
    }
}

/// Wire form: pi-parts as lists of coefficient strings "num" or "num/den".
#[derive(Debug, Clone, Serialize)]
pub struct ScalarJson {
    pub q: u32,
    pub r: u32,
    pub parts: Vec<Vec<String>>,
}

impl From<&Scalar> for ScalarJson {
    fn from(s: &Scalar) -> Self {
        let parts = s
            .parts
            .iter()
            .map(|a| {
                a.coeffs()
                    .iter()
                    .map(|c| {
                        if c.denom().is_one() {
                            format!("{}", c.numer())
                        } else {
                            format!("{}/{}", c.numer(), c.denom())
                        }
                    })
                    .collect()
            })
            .collect();
        ScalarJson { q: s.params.q, r: s.params.r, parts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u32, r: i64) -> ScalarParams {
        ScalarParams::new(q, r).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(ScalarParams::new(6, 1).is_err());
        assert!(ScalarParams::new(5, 0).is_err());
        let p = params(9, 2);
        assert_eq!((p.p(), p.f(), p.zeta_order()), (3, 2, 8));
    }

    #[test]
    fn pi_power_folding() {
        let p = params(5, 2);
        let pi = Scalar::monomial(p, 0, 1);
        assert_eq!(&pi * &pi, Scalar::from_int(p, 5));
        assert_eq!(Scalar::monomial(p, 0, 2), Scalar::from_int(p, 5));
        assert_eq!(Scalar::monomial(p, 0, -2), Scalar::from_rational(p, Rational64::new(1, 5)));
        // pi^-1 = pi / q.
        let pi_inv = Scalar::monomial(p, 0, -1);
        assert_eq!(&pi * &pi_inv, Scalar::one(p));
    }

    #[test]
    fn zeta_arithmetic_in_scalars() {
        let p = params(4, 1);
        let z = Scalar::zeta_pow(p, 1);
        let z3 = &(&z * &z) * &z;
        assert_eq!(z3, Scalar::one(p));
        assert_ne!(&z * &z, Scalar::one(p));
    }

    #[test]
    fn unit_sum_orthogonality() {
        // sum over units a of zeta^(j dlog a) is q-1 when (q-1) | j, else 0.
        for q in [2u32, 3, 4, 5, 7] {
            let p = params(q, 1);
            for j in 0..(2 * (q as i64 - 1)).max(2) {
                let mut sum = Scalar::zero(p);
                for a in FqElement::units(q).unwrap() {
                    sum = &sum + &Scalar::zeta_pow(p, j * a.dlog().unwrap() as i64);
                }
                if j % (q as i64 - 1) == 0 {
                    assert_eq!(sum, Scalar::from_int(p, q as i64 - 1), "q={q} j={j}");
                } else {
                    assert!(sum.is_zero(), "q={q} j={j}");
                }
            }
        }
    }

    #[test]
    fn integrality_examples() {
        let p = params(5, 2);
        assert!(Scalar::one(p).is_integral());
        assert!(Scalar::monomial(p, 2, 3).is_integral());
        assert!(!Scalar::monomial(p, 0, -1).is_integral());
        assert!(!Scalar::from_rational(p, Rational64::new(1, 5)).is_integral());
        assert!(Scalar::from_rational(p, Rational64::new(2, 1)).is_integral());
    }

    #[test]
    fn valuation_floor_examples() {
        let p = params(5, 2);
        assert_eq!(Scalar::zero(p).valuation_floor(), None);
        assert_eq!(Scalar::one(p).valuation_floor(), Some(0));
        assert_eq!(Scalar::monomial(p, 0, 1).valuation_floor(), Some(1));
        assert_eq!(Scalar::from_int(p, 5).valuation_floor(), Some(2));
        assert_eq!(Scalar::monomial(p, 3, 7).valuation_floor(), Some(7));
        assert_eq!(Scalar::monomial(p, 0, -1).valuation_floor(), Some(-1));
        assert_eq!(Scalar::from_rational(p, Rational64::new(1, 5)).valuation_floor(), Some(-2));

        // Ramified-over-p case: q = 4, r = 1, so v(2) = 1/2 floors to 0.
        let p41 = params(4, 1);
        assert_eq!(Scalar::from_int(p41, 2).valuation_floor(), Some(0));
        assert_eq!(Scalar::from_int(p41, 4).valuation_floor(), Some(1));
    }

    #[test]
    fn reduce_mod_pi_examples() {
        let p = params(5, 2);
        assert_eq!(Scalar::one(p).reduce_mod_pi().unwrap().repr(), 1);
        // zeta -> 2 (the distinguished generator of F_5).
        assert_eq!(Scalar::zeta_pow(p, 1).reduce_mod_pi().unwrap().repr(), 2);
        assert_eq!(Scalar::zeta_pow(p, 2).reduce_mod_pi().unwrap().repr(), 4);
        // pi and q die.
        assert!(Scalar::monomial(p, 0, 1).reduce_mod_pi().unwrap().is_zero());
        assert!(Scalar::from_int(p, 5).reduce_mod_pi().unwrap().is_zero());
        assert!(Scalar::from_int(p, 10).reduce_mod_pi().unwrap().is_zero());
        // Non-integral scalars have no reduction.
        assert!(matches!(
            Scalar::monomial(p, 0, -1).reduce_mod_pi(),
            Err(ScalarError::NotIntegral(_))
        ));
    }

    #[test]
    fn teichmuller_is_multiplicative_with_exact_reduction() {
        for q in [3u32, 4, 5, 7, 9] {
            let p = params(q, 2);
            for a in FqElement::all(q).unwrap() {
                let ta = Scalar::teichmuller(p, a);
                assert_eq!(ta.reduce_mod_pi().unwrap(), a, "q={q}");
                for b in FqElement::all(q).unwrap() {
                    let tb = Scalar::teichmuller(p, b);
                    let tab = Scalar::teichmuller(p, a * b);
                    assert_eq!(&ta * &tb, tab, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn ring_identities_spot_checks() {
        let p = params(4, 3);
        let x = &Scalar::monomial(p, 1, 2) + &Scalar::from_int(p, 3);
        let y = &Scalar::monomial(p, 2, 1) - &Scalar::one(p);
        let z = Scalar::monomial(p, 0, 4);
        let left = &x * &(&y + &z);
        let right = &(&x * &y) + &(&x * &z);
        assert_eq!(left, right);
        assert_eq!(&x * &y, &y * &x);
        assert_eq!(&x - &x, Scalar::zero(p));
    }

    #[test]
    fn wire_form_is_stable() {
        let p = params(5, 2);
        let s = &Scalar::monomial(p, 1, 1) + &Scalar::from_rational(p, Rational64::new(-1, 5));
        // zeta has order 4, so each part has phi(4) = 2 coefficients.
        let wire = ScalarJson::from(&s);
        assert_eq!(
            wire.parts,
            vec![vec!["-1/5".to_string(), "0".into()], vec!["0".into(), "1".into()]]
        );
    }
}
