//! Laurent series over F_q with explicit precision tracking.
//!
//! An element is a finite sum of terms c·t^k plus an optional precision
//! cutoff: when `prec` is `Some(n)`, coefficients at exponents below n are
//! exactly known and everything from n on is unknown (read: + O(t^n)).
//! `prec = None` means the element is exact.  Sums and products propagate
//! the cutoff; division is the only operation that turns exact inputs into
//! truncated outputs (unless the divisor is a single term, whose inverse is
//! again exact).

use std::collections::BTreeMap;

use crate::matrix::RingElem;
use crate::scalars::FqElement;

use super::OracleError;

/// Laurent series with coefficients in F_q.  Units of the valuation ring
/// have valuation 0; the uniformizer t has valuation 1.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentScalar {
    q: u32,
    coeffs: BTreeMap<i64, FqElement>,
    prec: Option<i64>,
}

impl LaurentScalar {
    /// The exact zero series.
    pub fn zero(q: u32) -> Result<Self, OracleError> {
        FqElement::zero(q)?;
        Ok(LaurentScalar { q, coeffs: BTreeMap::new(), prec: None })
    }

    /// The exact constant 1.
    pub fn one(q: u32) -> Result<Self, OracleError> {
        Self::constant(FqElement::one(q)?)
    }

    /// An exact constant series.
    pub fn constant(c: FqElement) -> Result<Self, OracleError> {
        Self::term(c, 0)
    }

    /// The exact single term c·t^k.
    pub fn term(c: FqElement, k: i64) -> Result<Self, OracleError> {
        let q = c.q();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Ok(LaurentScalar { q, coeffs, prec: None })
    }

    /// The uniformizer t.
    pub fn uniformizer(q: u32) -> Result<Self, OracleError> {
        Self::term(FqElement::one(q)?, 1)
    }

    /// An exact series from a term list; repeated exponents accumulate.
    pub fn from_terms(q: u32, terms: &[(i64, FqElement)]) -> Result<Self, OracleError> {
        let mut out = Self::zero(q)?;
        for (k, c) in terms {
            out = out.add(&Self::term(*c, *k)?);
        }
        Ok(out)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The cutoff exponent; `None` for an exact element.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Truncates to the given cutoff (keeps any tighter cutoff already set).
    pub fn truncated(&self, prec: i64) -> Self {
        let new_prec = Some(match self.prec {
            Some(p) => p.min(prec),
            None => prec,
        });
        let coeffs =
            self.coeffs.iter().filter(|(k, _)| **k < prec).map(|(k, c)| (*k, *c)).collect();
        LaurentScalar { q: self.q, coeffs, prec: new_prec }
    }

    /// True when no terms are known AND the element is exact, i.e. it is
    /// literally the zero series.
    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// True when no terms are known (zero up to the cutoff).
    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent and its coefficient, when any term is known.  The
    /// stored maps never hold zero coefficients, so this is the genuine
    /// leading term.
    pub fn leading(&self) -> Option<(i64, FqElement)> {
        self.coeffs.iter().next().map(|(k, c)| (*k, *c))
    }

    /// Valuation of the known part; `None` when no terms are known.
    pub fn valuation(&self) -> Option<i64> {
        self.leading().map(|(k, _)| k)
    }

    /// Smallest exponent at which a nonzero term could exist: the valuation
    /// when terms are present, otherwise the cutoff.  `None` only for the
    /// exact zero.
    fn low_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    /// The coefficient at exponent k (zero when absent or beyond cutoff).
    pub fn coeff(&self, k: i64) -> FqElement {
        self.coeffs.get(&k).copied().unwrap_or_else(|| FqElement::zero(self.q).expect("valid q"))
    }

    fn normalized(q: u32, mut coeffs: BTreeMap<i64, FqElement>, prec: Option<i64>) -> Self {
        coeffs.retain(|k, c| !c.is_zero() && prec.map_or(true, |p| *k < p));
        LaurentScalar { q, coeffs, prec }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, -*c)).collect();
        LaurentScalar { q: self.q, coeffs, prec: self.prec }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.q, rhs.q, "field order mismatch");
        let prec = match (self.prec, rhs.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            match coeffs.get(k).copied() {
                Some(x) => {
                    coeffs.insert(*k, x + *c);
                }
                None => {
                    coeffs.insert(*k, *c);
                }
            }
        }
        Self::normalized(self.q, coeffs, prec)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.q, rhs.q, "field order mismatch");
        if self.is_exactly_zero() || rhs.is_exactly_zero() {
            return LaurentScalar { q: self.q, coeffs: BTreeMap::new(), prec: None };
        }
        // Cutoff: a term of the product at exponent k is fully known iff k
        // is below both (self.prec + val rhs) and (rhs.prec + val self).
        let bound = |p: Option<i64>, other: &Self| -> Option<i64> {
            match (p, other.low_bound()) {
                (Some(p), Some(v)) => Some(p + v),
                _ => None,
            }
        };
        let prec = match (bound(self.prec, rhs), bound(rhs.prec, self)) {
            (None, p) | (p, None) => p,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        let mut coeffs: BTreeMap<i64, FqElement> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &rhs.coeffs {
                let k = i + j;
                if prec.map_or(false, |p| k >= p) {
                    continue;
                }
                let prod = *a * *b;
                match coeffs.get(&k).copied() {
                    Some(x) => {
                        coeffs.insert(k, x + prod);
                    }
                    None => {
                        coeffs.insert(k, prod);
                    }
                }
            }
        }
        Self::normalized(self.q, coeffs, prec)
    }

    pub fn scale(&self, c: FqElement) -> Self {
        assert_eq!(self.q, c.q(), "field order mismatch");
        if c.is_zero() {
            // An exact coefficient zero annihilates even unknown terms.
            return LaurentScalar { q: self.q, coeffs: BTreeMap::new(), prec: None };
        }
        let coeffs = self.coeffs.iter().map(|(k, x)| (*k, *x * c)).collect();
        LaurentScalar { q: self.q, coeffs, prec: self.prec }
    }

    /// Multiplies by t^k.
    pub fn shift(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e + k, *c)).collect();
        LaurentScalar { q: self.q, coeffs, prec: self.prec.map(|p| p + k) }
    }

    /// Multiplicative inverse.  A single-term element inverts exactly; any
    /// other element inverts by the geometric series, returning at least
    /// `rel_terms` known coefficients from the valuation of the result (or
    /// fewer when the input's own cutoff binds first).
    pub fn invert(&self, rel_terms: i64) -> Result<Self, OracleError> {
        let (v, lead) = self.leading().ok_or_else(|| {
            if self.is_exactly_zero() {
                OracleError::Singular { context: "inverse of zero".to_string() }
            } else {
                OracleError::Precision { context: "inverse of a series with no known terms".to_string() }
            }
        })?;
        let lead_inv = lead.inverse()?;
        // self = lead t^v (1 + y), val(y) >= 1, so the inverse is
        // lead^{-1} t^{-v} sum (-y)^k.
        let inherited = self.prec.map(|p| p - 2 * v);
        let target = match inherited {
            Some(p) => p.min(-v + rel_terms.max(1)),
            None => -v + rel_terms.max(1),
        };
        let unit = self.shift(-v).scale(lead_inv);
        let y = unit.sub(&Self::one(self.q)?);
        if y.is_zero_at_precision() && y.prec.is_none() {
            // Single term: exact inverse, but keep any inherited cutoff.
            let mut out = Self::term(lead_inv, -v)?;
            out.prec = inherited;
            return Ok(out);
        }
        let rel = target + v;
        let mut acc = Self::one(self.q)?.truncated(rel);
        let mut pow = Self::one(self.q)?.truncated(rel);
        let neg_y = y.neg().truncated(rel);
        let mut k = 1;
        while k < rel {
            pow = pow.mul(&neg_y);
            if pow.is_zero_at_precision() {
                break;
            }
            acc = acc.add(&pow);
            k += 1;
        }
        let mut out = acc.shift(-v).scale(lead_inv);
        out = match inherited {
            Some(p) => out.truncated(p.min(target)),
            None => out.truncated(target),
        };
        Ok(out)
    }

    /// self / rhs with the same precision policy as [`LaurentScalar::invert`].
    pub fn div(&self, rhs: &Self, rel_terms: i64) -> Result<Self, OracleError> {
        Ok(self.mul(&rhs.invert(rel_terms)?))
    }

    /// True when the two series have no known difference: all coefficients
    /// agree below the tighter of the two cutoffs.
    pub fn agrees_with(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero_at_precision()
    }

    /// Terms in exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElement)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }
}

impl RingElem for LaurentScalar {
    fn zero_like(&self) -> Self {
        LaurentScalar { q: self.q, coeffs: BTreeMap::new(), prec: None }
    }
    fn one_like(&self) -> Self {
        LaurentScalar::one(self.q).expect("valid q")
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn is_zero_elem(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl std::fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}t")?,
                _ => write!(f, "{c}t^{k}")?,
            }
        }
        if let Some(p) = self.prec {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(t^{p})")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Laurent[F{}]({})", self.q, self)
    }
}
