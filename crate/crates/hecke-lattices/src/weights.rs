//! Balanced integer weights: the subset inequality system, reversal,
//! reduction, and enumeration.
//!
//! A weight is a tuple n = (n_0, ..., n_d) with sum zero; it is balanced of
//! amplitude r when for every subset I of {0, ..., d}
//!
//! ```text
//! r * delta(I)  >=  sum_{i in I} n_i  >=  -r * delta(complement of I)
//! ```
//!
//! with delta(I) = sum(I) - |I|(|I|-1)/2, the excess of I over the smallest
//! index set of its size.  Balanced weights are exactly the exponent data of
//! characters admitting a stable lattice, which is why everything downstream
//! starts here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Subset loops are bitmasks over d+1 bits; anything bigger is refused.
pub const MAX_SUBSET_D: usize = 23;
/// Caps for `enumerate_balanced`.
pub const MAX_ENUM_WEIGHT_D: usize = 4;
pub const MAX_ENUM_WEIGHT_R: i64 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("amplitude must be positive, got {0}")]
    BadAmplitude(i64),
    #[error("weight must have at least one entry, got length {0}")]
    TooShort(usize),
    #[error("subset sweep needs d <= {max}, got d = {d}")]
    DomainTooLarge { d: usize, max: usize },
    #[error("enumeration needs d <= {MAX_ENUM_WEIGHT_D} and r <= {MAX_ENUM_WEIGHT_R}, got d = {d}, r = {r}")]
    EnumerationTooLarge { d: usize, r: i64 },
    #[error("weight is not balanced: {0}")]
    Unbalanced(BalanceViolation),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Witness for a failed balance check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BalanceViolation {
    /// The entries do not sum to zero.
    SumNonZero { sum: i64 },
    /// Eq-style subset bound failure: `sum` over `subset` escapes `bound` on `side`.
    Subset { subset: Vec<usize>, side: BoundSide, sum: i64, bound: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSide {
    Upper,
    Lower,
}

impl std::fmt::Display for BalanceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BalanceViolation::SumNonZero { sum } => write!(f, "entries sum to {sum}, not 0"),
            BalanceViolation::Subset { subset, side, sum, bound } => match side {
                BoundSide::Upper => {
                    write!(f, "subset {subset:?} has sum {sum} > upper bound {bound}")
                }
                BoundSide::Lower => {
                    write!(f, "subset {subset:?} has sum {sum} < lower bound {bound}")
                }
            },
        }
    }
}

/// delta(I) = sum_{i in I} i - |I|(|I|-1)/2; entries must be distinct.
pub fn delta(subset: &[usize]) -> i64 {
    let k = subset.len() as i64;
    let sum: i64 = subset.iter().map(|&i| i as i64).sum();
    sum - k * (k - 1) / 2
}

fn delta_of_mask(mask: u32, d: usize) -> i64 {
    let mut sum = 0i64;
    let mut k = 0i64;
    for i in 0..=d {
        if mask & (1 << i) != 0 {
            sum += i as i64;
            k += 1;
        }
    }
    sum - k * (k - 1) / 2
}

fn mask_to_subset(mask: u32, d: usize) -> Vec<usize> {
    (0..=d).filter(|&i| mask & (1 << i) != 0).collect()
}

fn check_domain(n: &[i64], r: i64) -> Result<usize, WeightError> {
    if r < 1 {
        return Err(WeightError::BadAmplitude(r));
    }
    if n.is_empty() {
        return Err(WeightError::TooShort(0));
    }
    let d = n.len() - 1;
    if d > MAX_SUBSET_D {
        return Err(WeightError::DomainTooLarge { d, max: MAX_SUBSET_D });
    }
    Ok(d)
}

/// Full balance check over all 2^(d+1) subsets; witness on failure.
pub fn is_balanced(n: &[i64], r: i64) -> Result<(), WeightError> {
    let d = check_domain(n, r)?;
    let total: i64 = n.iter().sum();
    if total != 0 {
        return Err(WeightError::Unbalanced(BalanceViolation::SumNonZero { sum: total }));
    }
    let full: u32 = if d + 1 == 32 { u32::MAX } else { (1u32 << (d + 1)) - 1 };
    for mask in 0..=full {
        let sum: i64 = (0..=d).filter(|&i| mask & (1 << i) != 0).map(|i| n[i]).sum();
        let upper = r * delta_of_mask(mask, d);
        if sum > upper {
            return Err(WeightError::Unbalanced(BalanceViolation::Subset {
                subset: mask_to_subset(mask, d),
                side: BoundSide::Upper,
                sum,
                bound: upper,
            }));
        }
        let lower = -r * delta_of_mask(full & !mask, d);
        if sum < lower {
            return Err(WeightError::Unbalanced(BalanceViolation::Subset {
                subset: mask_to_subset(mask, d),
                side: BoundSide::Lower,
                sum,
                bound: lower,
            }));
        }
    }
    Ok(())
}

/// The reversal n -> (-n_{d-i})_i; balance-preserving in both directions.
pub fn reverse_weight(n: &[i64]) -> Vec<i64> {
    n.iter().rev().map(|&x| -x).collect()
}

/// A certified balanced weight of length d+1 and amplitude r.
#[derive(Clone, PartialEq, Eq)]
pub struct BalancedWeight {
    n: Vec<i64>,
    r: i64,
}

impl std::fmt::Debug for BalancedWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BalancedWeight(r={}, n={:?})", self.r, self.n)
    }
}

impl BalancedWeight {
    pub fn new(n: Vec<i64>, r: i64) -> Result<Self, WeightError> {
        is_balanced(&n, r)?;
        Ok(BalancedWeight { n, r })
    }

    pub fn zero(d: usize, r: i64) -> Result<Self, WeightError> {
        Self::new(vec![0; d + 1], r)
    }

    pub fn d(&self) -> usize {
        self.n.len() - 1
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn entries(&self) -> &[i64] {
        &self.n
    }

    pub fn entry(&self, i: usize) -> i64 {
        self.n[i]
    }

    pub fn reversed(&self) -> BalancedWeight {
        BalancedWeight::new(reverse_weight(&self.n), self.r)
            .expect("reversal of a balanced weight is balanced")
    }

    /// The normalized weight with tilde_n_0 = 0 and 0 <= n_i - tilde_n_i <= r.
    ///
    /// Shifts to t_i = n_i + r(d-i) for i = 1..=d, then walks the shifted
    /// tuple down one unit at a time.  Each step finds the inclusion-maximal
    /// subset achieving equality in the lower shifted bound (the union of all
    /// equality subsets, asserted to itself achieve equality) and decrements
    /// the smallest index outside it whose total decrease stays below r.
    pub fn tilde_reduction(&self) -> Result<Vec<i64>, WeightError> {
        let d = self.d();
        let r = self.r;
        let t: Vec<i64> = (1..=d).map(|i| self.n[i] + r * (d - i) as i64).collect();
        let mut s = t.clone();
        let steps = s.iter().sum::<i64>() - r * (d as i64) * (d as i64 - 1) / 2;
        if steps < 0 {
            return Err(WeightError::Internal(format!(
                "shifted tuple sum below its floor by {steps}; input not balanced?"
            )));
        }
        let full: u32 = (1u32 << d) - 1; // masks over indices 1..=d, bit i-1 for index i
        for _ in 0..steps {
            // Union of all equality subsets for the lower shifted bound.
            let mut union: u32 = 0;
            for mask in 0..=full {
                let sum: i64 = (0..d).filter(|&b| mask & (1 << b) != 0).map(|b| s[b]).sum();
                let k = mask.count_ones() as i64;
                if sum == r * k * (k - 1) / 2 {
                    union |= mask;
                }
            }
            let usum: i64 = (0..d).filter(|&b| union & (1 << b) != 0).map(|b| s[b]).sum();
            let uk = union.count_ones() as i64;
            if usum != r * uk * (uk - 1) / 2 {
                return Err(WeightError::Internal(format!(
                    "union of equality subsets {union:#b} is not an equality subset"
                )));
            }
            let k = (0..d)
                .find(|&b| union & (1 << b) == 0 && s[b] + r > t[b])
                .ok_or_else(|| {
                    WeightError::Internal("no decrementable index outside the equality core".into())
                })?;
            s[k] -= 1;
        }
        let mut tilde = Vec::with_capacity(d + 1);
        tilde.push(0);
        for i in 1..=d {
            tilde.push(s[i - 1] - r * (d - i) as i64);
        }
        Ok(tilde)
    }

    /// The length-d balanced weight m with m_{i-1} = tilde_n_i.
    pub fn reduce_weight(&self) -> Result<BalancedWeight, WeightError> {
        let tilde = self.tilde_reduction()?;
        let m: Vec<i64> = tilde[1..].to_vec();
        BalancedWeight::new(m, self.r).map_err(|e| {
            WeightError::Internal(format!("reduction produced a non-balanced weight: {e}"))
        })
    }
}

/// All balanced weights of length d+1 and amplitude r, lexicographic on n.
pub fn enumerate_balanced(d: usize, r: i64) -> Result<Vec<BalancedWeight>, WeightError> {
    if r < 1 {
        return Err(WeightError::BadAmplitude(r));
    }
    if d == 0 {
        return Err(WeightError::TooShort(1));
    }
    if d > MAX_ENUM_WEIGHT_D || r > MAX_ENUM_WEIGHT_R {
        return Err(WeightError::EnumerationTooLarge { d, r });
    }
    // Singleton bounds give a finite box: -r*delta(complement) <= n_i <= r*i.
    let mut lo = Vec::with_capacity(d + 1);
    let mut hi = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let comp: Vec<usize> = (0..=d).filter(|&j| j != i).collect();
        lo.push(-r * delta(&comp));
        hi.push(r * i as i64);
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(d + 1);
    search_box(d, r, &lo, &hi, &mut prefix, &mut out);
    Ok(out)
}

fn search_box(
    d: usize,
    r: i64,
    lo: &[i64],
    hi: &[i64],
    prefix: &mut Vec<i64>,
    out: &mut Vec<BalancedWeight>,
) {
    let i = prefix.len();
    if i == d {
        let last = -prefix.iter().sum::<i64>();
        if last < lo[d] || last > hi[d] {
            return;
        }
        let mut n = prefix.clone();
        n.push(last);
        if is_balanced(&n, r).is_ok() {
            out.push(BalancedWeight { n, r });
        }
        return;
    }
    for v in lo[i]..=hi[i] {
        prefix.push(v);
        search_box(d, r, lo, hi, prefix, out);
        prefix.pop();
    }
}

/// Wire format: {"d": int, "r": int, "n": [int, ...]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightJson {
    pub d: usize,
    pub r: i64,
    pub n: Vec<i64>,
}

impl From<&BalancedWeight> for WeightJson {
    fn from(w: &BalancedWeight) -> Self {
        WeightJson { d: w.d(), r: w.r(), n: w.entries().to_vec() }
    }
}

impl WeightJson {
    pub fn validate(&self) -> Result<BalancedWeight, WeightError> {
        if self.n.len() != self.d + 1 {
            return Err(WeightError::TooShort(self.n.len()));
        }
        BalancedWeight::new(self.n.clone(), self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&[]), 0);
        for m in 1..6 {
            let minimal: Vec<usize> = (0..m).collect();
            assert_eq!(delta(&minimal), 0);
        }
        assert_eq!(delta(&[2, 4]), 5);
    }

    #[test]
    fn delta_reversal_identity() {
        // delta(I) = delta({d - i : i not in I}) for all I, d <= 5.
        for d in 1..=5usize {
            for mask in 0u32..(1 << (d + 1)) {
                let subset = mask_to_subset(mask, d);
                let comp_reflected: Vec<usize> =
                    (0..=d).filter(|i| mask & (1 << i) == 0).map(|i| d - i).collect();
                assert_eq!(delta(&subset), delta(&comp_reflected), "d={d} mask={mask:#b}");
            }
        }
    }

    #[test]
    fn is_balanced_examples() {
        assert!(is_balanced(&[0, 0, 0], 1).is_ok());
        assert!(is_balanced(&[-1, 0, 1], 1).is_ok());
        match is_balanced(&[1, -1], 1) {
            Err(WeightError::Unbalanced(BalanceViolation::Subset { subset, side, .. })) => {
                assert_eq!(subset, vec![0]);
                assert_eq!(side, BoundSide::Upper);
            }
            other => panic!("expected subset witness, got {other:?}"),
        }
        match is_balanced(&[1, 0, 1], 1) {
            Err(WeightError::Unbalanced(BalanceViolation::SumNonZero { sum: 2 })) => {}
            other => panic!("expected sum witness, got {other:?}"),
        }
    }

    #[test]
    fn is_balanced_rejects_bad_parameters() {
        assert!(matches!(is_balanced(&[0, 0], 0), Err(WeightError::BadAmplitude(0))));
        assert!(matches!(is_balanced(&[], 1), Err(WeightError::TooShort(0))));
        // A single zero entry is the weight every d = 1 weight reduces to.
        assert!(is_balanced(&[0], 1).is_ok());
    }

    #[test]
    fn reverse_weight_examples() {
        assert_eq!(reverse_weight(&[0, 0, 0]), vec![0, 0, 0]);
        assert_eq!(reverse_weight(&[-1, 0, 1]), vec![-1, 0, 1]);
        let rev = reverse_weight(&[0, -1, 1]);
        assert_eq!(rev, vec![-1, 1, 0]);
        assert!(is_balanced(&[0, -1, 1], 1).is_ok());
        assert!(is_balanced(&rev, 1).is_ok());
    }

    #[test]
    fn tilde_reduction_examples() {
        let zero = BalancedWeight::zero(3, 2).unwrap();
        assert_eq!(zero.tilde_reduction().unwrap(), vec![0, 0, 0, 0]);

        let w = BalancedWeight::new(vec![-1, 1], 1).unwrap();
        assert_eq!(w.tilde_reduction().unwrap(), vec![0, 0]);

        let w = BalancedWeight::new(vec![-1, 0, 1], 1).unwrap();
        let tilde = w.tilde_reduction().unwrap();
        assert_eq!(tilde[0], 0);
        assert!(is_balanced(&tilde, 1).is_ok());
        for i in 1..=2 {
            let diff = w.entry(i) - tilde[i];
            assert!((0..=1).contains(&diff), "entry {i}: diff {diff}");
        }
    }

    #[test]
    fn reduce_weight_examples() {
        let w = BalancedWeight::new(vec![-1, 1], 1).unwrap();
        assert_eq!(w.reduce_weight().unwrap().entries(), &[0]);

        let w = BalancedWeight::zero(2, 1).unwrap();
        assert_eq!(w.reduce_weight().unwrap().entries(), &[0, 0]);

        let w = BalancedWeight::new(vec![-1, 0, 1], 1).unwrap();
        let m = w.reduce_weight().unwrap();
        assert_eq!(m.d(), 1);
        for i in 1..=2 {
            let diff = w.entry(i) - m.entry(i - 1);
            assert!((0..=1).contains(&diff));
        }
    }

    #[test]
    fn enumerate_balanced_examples() {
        let e11 = enumerate_balanced(1, 1).unwrap();
        let tuples: Vec<&[i64]> = e11.iter().map(|w| w.entries()).collect();
        assert_eq!(tuples, vec![&[-1, 1][..], &[0, 0][..]]);

        let e12 = enumerate_balanced(1, 2).unwrap();
        let tuples: Vec<&[i64]> = e12.iter().map(|w| w.entries()).collect();
        assert_eq!(tuples, vec![&[-2, 2][..], &[-1, 1][..], &[0, 0][..]]);

        for (d, r) in [(2, 1), (3, 2)] {
            let all = enumerate_balanced(d, r).unwrap();
            assert!(all.iter().any(|w| w.entries().iter().all(|&x| x == 0)), "d={d} r={r}");
        }
        assert!(enumerate_balanced(5, 1).is_err());
    }

    #[test]
    fn enumeration_is_sorted_and_deduplicated() {
        for (d, r) in [(2, 2), (3, 1)] {
            let all = enumerate_balanced(d, r).unwrap();
            for pair in all.windows(2) {
                assert!(pair[0].entries() < pair[1].entries());
            }
        }
    }

    #[test]
    fn reduction_sweep_small() {
        for (d, r) in [(2, 1), (2, 2), (3, 1)] {
            for w in enumerate_balanced(d, r).unwrap() {
                let m = w.reduce_weight().unwrap();
                assert_eq!(m.d(), d - 1);
                for i in 1..=d {
                    let diff = w.entry(i) - m.entry(i - 1);
                    assert!((0..=r).contains(&diff), "w={w:?} m={m:?} i={i}");
                }
            }
        }
    }

    #[test]
    fn weight_json_round_trip() {
        let w = BalancedWeight::new(vec![-1, 0, 1], 1).unwrap();
        let json = serde_json::to_string(&WeightJson::from(&w)).unwrap();
        let back: WeightJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.validate().unwrap(), w);
    }

    proptest! {
        #[test]
        fn reversal_is_an_involution(n in proptest::collection::vec(-5i64..=5, 2..7)) {
            prop_assert_eq!(reverse_weight(&reverse_weight(&n)), n);
        }

        #[test]
        fn reversal_preserves_balance_verdict(
            mut n in proptest::collection::vec(-3i64..=3, 2..6),
            r in 1i64..=2,
        ) {
            // Force sum zero so the subset system is the live condition.
            let sum: i64 = n.iter().sum();
            let last = n.len() - 1;
            n[last] -= sum;
            let rev = reverse_weight(&n);
            prop_assert_eq!(is_balanced(&n, r).is_ok(), is_balanced(&rev, r).is_ok());
        }
    }
}
