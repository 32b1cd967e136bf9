//! Integrating functions nabla: W -> Z attached to a balanced weight, and
//! the derived sign data sigma and step data used by the mod-p side.
//!
//! A function nabla integrates the weight n when
//!
//! ```text
//! nabla(w) - nabla(w ubar) = -n_{mu(w)}                  (rotation steps)
//! nabla(w) - r <= nabla(w s_i) <= nabla(w)               (for ascents at i)
//! ```
//!
//! Such a function always exists for a balanced weight; it is built here by
//! the rank recursion through the reduced weight and then re-verified
//! explicitly.  The same two conditions, with the rotation steps driven by a
//! character's pi-orders instead of the weight, are exactly lattice
//! stability; `check_equinab` tests them in both the all-generators form and
//! the single-generator form, which a theorem makes equivalent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterError, Permutation};
use crate::psmod::CharacterData;
use crate::weights::{BalancedWeight, WeightError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NablaError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("value table has {got} entries, expected {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("integration check failed: {0}")]
    Integration(IntegrationViolation),
    #[error("stability check failed: {0}")]
    Stability(StabilityViolation),
    #[error("sign data undefined: rotation range violated at w = {w} (difference {diff} outside [0, {r}])")]
    SigmaPrecondition { w: String, diff: i64, r: i64 },
    #[error("degree mismatch: nabla on d = {nabla_d}, data on d = {data_d}")]
    DegreeMismatch { nabla_d: usize, data_d: usize },
}

/// Witness for a failed weight-integration check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegrationViolation {
    /// Rotation step at w: nabla(w) - nabla(w ubar) should be -n_{mu(w)}.
    RotationStep { w: String, got: i64, expected: i64 },
    /// Ascent bound at (w, i): nabla(w s_i) escaped [nabla(w) - r, nabla(w)].
    AscentRange { w: String, i: usize, base: i64, image: i64, r: i64 },
}

impl std::fmt::Display for IntegrationViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntegrationViolation::RotationStep { w, got, expected } => {
                write!(f, "rotation step at w = {w}: got {got}, expected {expected}")
            }
            IntegrationViolation::AscentRange { w, i, base, image, r } => write!(
                f,
                "ascent bound at w = {w}, i = {i}: value {image} outside [{}, {base}]",
                base - r
            ),
        }
    }
}

/// Witness for a failed lattice-stability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityViolation {
    /// Rotation step at w against the character's pi-order at slot w(d).
    RotationStep { w: String, got: i64, expected: i64 },
    /// Same ascent bound as the integration check.
    AscentRange { w: String, i: usize, base: i64, image: i64, r: i64 },
}

impl std::fmt::Display for StabilityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StabilityViolation::RotationStep { w, got, expected } => {
                write!(f, "rotation step at w = {w}: got {got}, expected {expected}")
            }
            StabilityViolation::AscentRange { w, i, base, image, r } => write!(
                f,
                "ascent bound at w = {w}, i = {i}: value {image} outside [{}, {base}]",
                base - r
            ),
        }
    }
}

/// Which ascent constraints `check_equinab` enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquinabMode {
    /// Rotation steps plus ascent bounds for every generator s_1, ..., s_d.
    Full,
    /// Rotation steps plus ascent bounds for s_d only.
    SdOnly,
}

/// An integer function on W, stored by lexicographic rank.
#[derive(Clone, PartialEq, Eq)]
pub struct NablaFunction {
    d: usize,
    values: Vec<i64>,
}

impl NablaFunction {
    pub fn from_values(d: usize, values: Vec<i64>) -> Result<Self, NablaError> {
        let expected: usize = (1..=d + 1).product();
        if values.len() != expected {
            return Err(NablaError::WrongSize { expected, got: values.len() });
        }
        Ok(NablaFunction { d, values })
    }

    pub fn constant(d: usize, c: i64) -> Self {
        let size: usize = (1..=d + 1).product();
        NablaFunction { d, values: vec![c; size] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn value(&self, w: &Permutation) -> i64 {
        debug_assert_eq!(w.d(), self.d, "permutation degree mismatch");
        self.values[w.lex_rank()]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// The same function plus a constant (the conditions only see differences).
    pub fn shifted(&self, c: i64) -> Self {
        NablaFunction { d: self.d, values: self.values.iter().map(|v| v + c).collect() }
    }

    pub fn with_value(&self, w: &Permutation, v: i64) -> Self {
        let mut out = self.clone();
        out.values[w.lex_rank()] = v;
        out
    }
}

impl std::fmt::Debug for NablaFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NablaFunction(d={}, {:?})", self.d, self.values)
    }
}

/// Builds an integrating function for a balanced weight by the rank
/// recursion: reduce the weight to length d, integrate there, then extend
/// along the rotation coordinates w = w' ubar^j with
///
/// ```text
/// nabla(w' ubar^j) = nabla'(w') + sum_{t=0}^{j-1} n_{mu(w' ubar^t)}
/// ```
///
/// The result is normalized by nabla(identity) = 0 and re-checked in full
/// before being returned.
pub fn build_nabla(weight: &BalancedWeight) -> Result<NablaFunction, NablaError> {
    let values = build_values(weight)?;
    let nabla = NablaFunction::from_values(weight.d(), values)?;
    check_integration(&nabla, weight.entries(), weight.r())?;
    Ok(nabla)
}

fn build_values(weight: &BalancedWeight) -> Result<Vec<i64>, NablaError> {
    let d = weight.d();
    if d == 0 {
        return Ok(vec![0]);
    }
    let sub = build_values(&weight.reduce_weight()?)?;
    let size: usize = (1..=d + 1).product();
    let mut values = vec![0i64; size];
    for w in Permutation::enumerate(d)? {
        // w = w' ubar^j with w' fixing d; j is determined by w^{-1}(d).
        let j = (w.inverse().apply(d) + 1) % (d + 1);
        let w_prime = w.compose(&Permutation::ubar_pow(d, -(j as i64)))?;
        debug_assert_eq!(w_prime.apply(d), d);
        let mut v = sub[w_prime.restrict()?.lex_rank()];
        for t in 0..j {
            let wt = w_prime.compose(&Permutation::ubar_pow(d, t as i64))?;
            v += weight.entry(wt.mu());
        }
        values[w.lex_rank()] = v;
    }
    Ok(values)
}

/// Full verification of the two integration conditions against a weight.
pub fn check_integration(nabla: &NablaFunction, n: &[i64], r: i64) -> Result<(), NablaError> {
    let d = nabla.d;
    if n.len() != d + 1 {
        return Err(NablaError::DegreeMismatch { nabla_d: d, data_d: n.len().saturating_sub(1) });
    }
    let ubar = Permutation::ubar(d);
    for w in Permutation::enumerate(d)? {
        let got = nabla.value(&w) - nabla.value(&w.compose(&ubar)?);
        let expected = -n[w.mu()];
        if got != expected {
            return Err(NablaError::Integration(IntegrationViolation::RotationStep {
                w: w.to_string(),
                got,
                expected,
            }));
        }
        for i in 1..=d {
            if !w.ascends_at(i) {
                continue;
            }
            let base = nabla.value(&w);
            let image = nabla.value(&w.times_s(i)?);
            if image > base || image < base - r {
                return Err(NablaError::Integration(IntegrationViolation::AscentRange {
                    w: w.to_string(),
                    i,
                    base,
                    image,
                    r,
                }));
            }
        }
    }
    Ok(())
}

/// Lattice-stability conditions for nabla against a character: rotation
/// steps must match the character's pi-order at slot w(d), and ascent
/// bounds must hold (for every generator in `Full` mode, for s_d alone in
/// `SdOnly` mode).  The two modes agree on all inputs; that equivalence is
/// a theorem exercised in the test suite, not assumed here.
pub fn check_equinab(
    nabla: &NablaFunction,
    theta: &CharacterData,
    mode: EquinabMode,
) -> Result<(), NablaError> {
    let d = nabla.d;
    if theta.d() != d {
        return Err(NablaError::DegreeMismatch { nabla_d: d, data_d: theta.d() });
    }
    let r = theta.r();
    let ubar = Permutation::ubar(d);
    let generators: Vec<usize> = match mode {
        EquinabMode::Full => (1..=d).collect(),
        EquinabMode::SdOnly => vec![d],
    };
    for w in Permutation::enumerate(d)? {
        let got = nabla.value(&w) - nabla.value(&w.compose(&ubar)?);
        let expected = theta.pi_ord_at_slot(w.apply(d));
        if got != expected {
            return Err(NablaError::Stability(StabilityViolation::RotationStep {
                w: w.to_string(),
                got,
                expected,
            }));
        }
        for &i in &generators {
            if !w.ascends_at(i) {
                continue;
            }
            let base = nabla.value(&w);
            let image = nabla.value(&w.times_s(i)?);
            if image > base || image < base - r {
                return Err(NablaError::Stability(StabilityViolation::AscentRange {
                    w: w.to_string(),
                    i,
                    base,
                    image,
                    r,
                }));
            }
        }
    }
    Ok(())
}

/// Sign data on the ascent set W^{s_d}: None off the ascent set, otherwise
/// 1, 0, -1 as nabla(w s_d) is nabla(w), strictly inside, or nabla(w) - r.
#[derive(Clone, PartialEq, Eq)]
pub struct SigmaFunction {
    d: usize,
    values: Vec<Option<i8>>,
}

impl SigmaFunction {
    pub fn from_values(d: usize, values: Vec<Option<i8>>) -> Result<Self, NablaError> {
        let expected: usize = (1..=d + 1).product();
        if values.len() != expected {
            return Err(NablaError::WrongSize { expected, got: values.len() });
        }
        for w in Permutation::enumerate(d)? {
            let defined = values[w.lex_rank()].is_some();
            if defined != w.ascends_at(d) {
                return Err(NablaError::SigmaPrecondition {
                    w: w.to_string(),
                    diff: 0,
                    r: 0,
                });
            }
        }
        Ok(SigmaFunction { d, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn value(&self, w: &Permutation) -> Option<i8> {
        debug_assert_eq!(w.d(), self.d);
        self.values[w.lex_rank()]
    }

    /// All assignments W^{s_d} -> {-1, 0, 1}; 3^((d+1)!/2) of them, capped
    /// at d <= 2 (27 functions there).
    pub fn enumerate_all(d: usize) -> Result<Vec<SigmaFunction>, NablaError> {
        assert!(d <= 2, "sigma enumeration is only meant for d <= 2");
        let perms = Permutation::enumerate(d)?;
        let domain: Vec<usize> =
            perms.iter().filter(|w| w.ascends_at(d)).map(|w| w.lex_rank()).collect();
        let size: usize = (1..=d + 1).product();
        let mut out = Vec::new();
        let count = 3usize.pow(domain.len() as u32);
        for code in 0..count {
            let mut values = vec![None; size];
            let mut c = code;
            for &rank in &domain {
                values[rank] = Some((c % 3) as i8 - 1);
                c /= 3;
            }
            out.push(SigmaFunction { d, values });
        }
        Ok(out)
    }
}

impl std::fmt::Debug for SigmaFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SigmaFunction(d={}, {:?})", self.d, self.values)
    }
}

/// Reads the sign data off an integrating function.  Requires the s_d
/// ascent bounds to hold (otherwise the three cases are not exhaustive).
pub fn sigma_from_nabla(nabla: &NablaFunction, r: i64) -> Result<SigmaFunction, NablaError> {
    let d = nabla.d;
    let size: usize = (1..=d + 1).product();
    let mut values = vec![None; size];
    for w in Permutation::enumerate(d)? {
        if !w.ascends_at(d) {
            continue;
        }
        let diff = nabla.value(&w) - nabla.value(&w.times_s(d)?);
        if diff < 0 || diff > r {
            return Err(NablaError::SigmaPrecondition { w: w.to_string(), diff, r });
        }
        values[w.lex_rank()] = Some(if diff == 0 {
            1
        } else if diff == r {
            -1
        } else {
            0
        });
    }
    Ok(SigmaFunction { d, values })
}

/// The step function del(w) = nabla(w) - nabla(w s_d), total on W and
/// automatically antisymmetric under right multiplication by s_d.  Indexed
/// by lexicographic rank.
pub fn partial_from_nabla(nabla: &NablaFunction) -> Result<Vec<i64>, NablaError> {
    let d = nabla.d;
    let mut out = vec![0i64; nabla.values.len()];
    for w in Permutation::enumerate(d)? {
        out[w.lex_rank()] = nabla.value(&w) - nabla.value(&w.times_s(d)?);
    }
    Ok(out)
}

/// Wire format: {"d": int, "entries": {"<one-line permutation>": int}}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NablaJson {
    pub d: usize,
    pub entries: BTreeMap<String, i64>,
}

impl From<&NablaFunction> for NablaJson {
    fn from(nabla: &NablaFunction) -> Self {
        let mut entries = BTreeMap::new();
        for w in Permutation::enumerate(nabla.d).expect("stored d is enumerable") {
            entries.insert(w.to_string(), nabla.value(&w));
        }
        NablaJson { d: nabla.d, entries }
    }
}

impl NablaJson {
    pub fn validate(&self) -> Result<NablaFunction, NablaError> {
        let perms = Permutation::enumerate(self.d)?;
        if self.entries.len() != perms.len() {
            return Err(NablaError::WrongSize { expected: perms.len(), got: self.entries.len() });
        }
        let mut values = vec![0i64; perms.len()];
        for w in &perms {
            let key = w.to_string();
            let v = self.entries.get(&key).ok_or(NablaError::WrongSize {
                expected: perms.len(),
                got: self.entries.len(),
            })?;
            values[w.lex_rank()] = *v;
        }
        NablaFunction::from_values(self.d, values)
    }
}
