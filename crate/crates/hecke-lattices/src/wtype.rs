//! Mod-p modules indexed by sign data: direct construction from
//! (theta, sigma, epsilon), reduction of a stable lattice, a necessary
//! relation checker for the action question, and realization of a module
//! back as a lattice reduction from increment data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterError, Permutation};
use crate::matrix::Matrix;
use crate::nabla::{sigma_from_nabla, NablaError, NablaFunction, SigmaFunction};
use crate::psmod::{
    is_lattice_stable, rebase_to_lattice, run_relation_checks, CharacterData, HeckeModule,
    PsmodError, RelationInputs, RelationReport,
};
use crate::scalars::{FieldError, FqElement, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WTypeError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Nabla(#[from] NablaError),
    #[error(transparent)]
    Psmod(#[from] PsmodError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("component lengths disagree with d = {d}")]
    DegreeMismatch { d: usize },
    #[error("epsilon must be a unit, got 0 at w = {w}")]
    ZeroEpsilon { w: String },
    #[error("sigma is undefined at the ascent-set element {w}")]
    SigmaDomain { w: String },
    #[error("increment {value} at w = {w} is outside [-{r}, {r}]")]
    PartialRange { w: String, value: i64, r: i64 },
    #[error("increments at {w} and its s_d-neighbor do not negate each other")]
    PartialAntisymmetry { w: String },
    #[error("increment {value} at w = {w} does not match sigma = {sigma}")]
    SigmaIncompatible { w: String, value: i64, sigma: i8 },
    #[error("exchange condition ({rule}) fails at w = {w}, i = {i}, j = {j}")]
    Cocycle { rule: u8, w: String, i: usize, j: usize },
    #[error("epsilon is not constant on w(0)-classes: differs at {w} and {w} s_{i}")]
    EpsilonHypothesis { w: String, i: usize },
    #[error("word sums disagree for the pair (e, {v})")]
    WordIndependence { v: String },
    #[error("rotation increments are not constant on the class of slot {slot}")]
    ThetaInconsistent { slot: usize },
    #[error("realized lattice does not reduce to the prescribed module at generator {generator}")]
    RoundTrip { generator: String },
    #[error("reduction paths disagree at generator {generator}")]
    ReductionMismatch { generator: String },
}

/// A module on basis {g_w} over the residue field, built from a unit
/// character (exponent tuple), sign data on the ascent set of the last
/// generator, and a unit epsilon per basis element.  Only the generators
/// that survive reduction are stored: the torus basis, both rotations, and
/// the last reflection.
#[derive(Clone)]
pub struct WTypeModule {
    d: usize,
    q: u32,
    theta_exp: Vec<i64>,
    sigma: SigmaFunction,
    eps: Vec<FqElement>,
    t_basis: Vec<Matrix<FqElement>>,
    u: Matrix<FqElement>,
    u_inv: Matrix<FqElement>,
    s_d: Matrix<FqElement>,
}

impl std::fmt::Debug for WTypeModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WTypeModule(d={}, q={}, a={:?})", self.d, self.q, self.theta_exp)
    }
}

impl WTypeModule {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn theta_exp(&self) -> &[i64] {
        &self.theta_exp
    }

    pub fn sigma(&self) -> &SigmaFunction {
        &self.sigma
    }

    /// Epsilon by lexicographic rank.
    pub fn eps(&self) -> &[FqElement] {
        &self.eps
    }

    pub fn t_basis(&self) -> &[Matrix<FqElement>] {
        &self.t_basis
    }

    pub fn u(&self) -> &Matrix<FqElement> {
        &self.u
    }

    pub fn u_inv(&self) -> &Matrix<FqElement> {
        &self.u_inv
    }

    pub fn s_d(&self) -> &Matrix<FqElement> {
        &self.s_d
    }

    /// Torus matrix for arbitrary digit exponents (diagonal).
    pub fn t_matrix(&self, digit_exp: &[i64]) -> Result<Matrix<FqElement>, WTypeError> {
        torus_matrix(self.d, self.q, &self.theta_exp, digit_exp)
    }
}

fn zeta_order(q: u32) -> i64 {
    (q as i64 - 1).max(1)
}

/// True when the unit character separates slots w(d-1) and w(d), i.e. is
/// nontrivial on the coroot through s_d conjugated by w.
fn regular_at_d(theta_exp: &[i64], w: &Permutation, q: u32) -> bool {
    let d = w.d();
    let n = zeta_order(q);
    (theta_exp[w.apply(d - 1)] - theta_exp[w.apply(d)]).rem_euclid(n) != 0
}

/// kappa_w = theta on the sign matrix conjugated in from the last
/// reflection; the exponent lands on slot w(d), and the value is +-1.
fn kappa_w(theta_exp: &[i64], w: &Permutation, q: u32) -> Result<FqElement, WTypeError> {
    let d = w.d();
    let e = FqElement::from_int(q, -1)?.dlog().expect("-1 is a unit") as i64;
    Ok(FqElement::generator_pow(q, theta_exp[w.apply(d)] * e)?)
}

fn torus_matrix(
    d: usize,
    q: u32,
    theta_exp: &[i64],
    digit_exp: &[i64],
) -> Result<Matrix<FqElement>, WTypeError> {
    debug_assert_eq!(digit_exp.len(), d + 1);
    let perms = Permutation::enumerate(d)?;
    let zero = FqElement::zero(q)?;
    let mut m = Matrix::zero(perms.len(), perms.len(), &zero);
    for w in &perms {
        let exp: i64 = (0..=d).map(|k| theta_exp[w.apply(k)] * digit_exp[k]).sum();
        m.set(w.lex_rank(), w.lex_rank(), FqElement::generator_pow(q, -exp)?);
    }
    Ok(m)
}

/// Builds the module directly from its defining data.  The last-reflection
/// matrix follows the four-case table: on an ascent column the image basis
/// vector appears exactly when sigma is 1 there; on a descent column the
/// image appears exactly when sigma at the s_d-neighbor is -1, and the
/// kappa-signed diagonal term appears exactly when the unit character is
/// not regular there; every other coefficient is zero.
pub fn make_wtype_module(
    theta_exp: &[i64],
    sigma: &SigmaFunction,
    eps: &[FqElement],
    q: u32,
) -> Result<WTypeModule, WTypeError> {
    let d = sigma.d();
    if theta_exp.len() != d + 1 {
        return Err(WTypeError::DegreeMismatch { d });
    }
    let perms = Permutation::enumerate(d)?;
    if eps.len() != perms.len() {
        return Err(WTypeError::DegreeMismatch { d });
    }
    let n = zeta_order(q);
    let theta_exp: Vec<i64> = theta_exp.iter().map(|&a| a.rem_euclid(n)).collect();
    for (w, &e) in perms.iter().zip(eps) {
        if e.is_zero() {
            return Err(WTypeError::ZeroEpsilon { w: w.to_string() });
        }
        if e.q() != q {
            return Err(WTypeError::DegreeMismatch { d });
        }
    }

    let zero = FqElement::zero(q)?;
    let one = FqElement::one(q)?;
    let size = perms.len();

    let mut t_basis = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let mut e = vec![0i64; d + 1];
        e[j] = 1;
        t_basis.push(torus_matrix(d, q, &theta_exp, &e)?);
    }

    let ubar = Permutation::ubar(d);
    let ubar_inv = Permutation::ubar_pow(d, -1);
    let mut u = Matrix::zero(size, size, &zero);
    let mut u_inv = Matrix::zero(size, size, &zero);
    for w in &perms {
        let wu = w.compose(&ubar)?;
        u.set(wu.lex_rank(), w.lex_rank(), eps[wu.lex_rank()].inverse()?);
        let wui = w.compose(&ubar_inv)?;
        u_inv.set(wui.lex_rank(), w.lex_rank(), eps[w.lex_rank()]);
    }

    let mut s_d = Matrix::zero(size, size, &zero);
    for w in &perms {
        let col = w.lex_rank();
        let ws = w.times_s(d)?;
        if w.ascends_at(d) {
            let value = sigma
                .value(w)
                .ok_or_else(|| WTypeError::SigmaDomain { w: w.to_string() })?;
            if value == 1 {
                s_d.set(ws.lex_rank(), col, one);
            }
        } else {
            let value = sigma
                .value(&ws)
                .ok_or_else(|| WTypeError::SigmaDomain { w: ws.to_string() })?;
            let regular = regular_at_d(&theta_exp, w, q);
            if value == -1 {
                s_d.set(ws.lex_rank(), col, one);
            }
            if !regular {
                s_d.set(col, col, -kappa_w(&theta_exp, w, q)?);
            }
        }
    }

    Ok(WTypeModule {
        d,
        q,
        theta_exp,
        sigma: sigma.clone(),
        eps: eps.to_vec(),
        t_basis,
        u,
        u_inv,
        s_d,
    })
}

/// The unit part of Theta on the class elements: eps_w is the reduction of
/// zeta^(u_j) for the rotation index j carrying slot w(0).  Indexed by
/// lexicographic rank.
pub fn epsilon_from_character(c: &CharacterData) -> Result<Vec<FqElement>, WTypeError> {
    let d = c.d();
    let perms = Permutation::enumerate(d)?;
    let mut eps = vec![FqElement::one(c.q())?; perms.len()];
    for w in &perms {
        eps[w.lex_rank()] = FqElement::generator_pow(c.q(), c.unit_exp_at_slot(w.apply(0)))?;
    }
    Ok(eps)
}

/// Reduces the lattice spanned by the rescaled basis modulo the maximal
/// ideal.  Two computations run independently: entrywise reduction of the
/// rescaled operator matrices, and direct construction from the reduced
/// data (sign function of nabla, unit parts of Theta, unit character).
/// Their agreement is asserted, not assumed.
pub fn reduce_lattice(
    c: &CharacterData,
    nabla: &NablaFunction,
) -> Result<WTypeModule, WTypeError> {
    is_lattice_stable(c, nabla)?;
    let module = rebase_to_lattice(&HeckeModule::in_f_basis(c)?, nabla)?;
    let reduce = |m: &Matrix<crate::scalars::Scalar>| -> Result<Matrix<FqElement>, ScalarError> {
        m.try_map(|entry| entry.reduce_mod_pi())
    };
    let sigma = sigma_from_nabla(nabla, c.r())?;
    let eps = epsilon_from_character(c)?;
    let direct = make_wtype_module(c.theta_exp(), &sigma, &eps, c.q())?;

    let mut pairs: Vec<(String, Matrix<FqElement>, &Matrix<FqElement>)> = Vec::new();
    for (j, t) in module.t_basis().iter().enumerate() {
        pairs.push((format!("T_t[digit {j}]"), reduce(t)?, &direct.t_basis[j]));
    }
    pairs.push(("T_u".into(), reduce(module.u())?, &direct.u));
    pairs.push(("T_u_inv".into(), reduce(module.u_inv())?, &direct.u_inv));
    pairs.push((format!("T_s{}", c.d()), reduce(module.s_d())?, &direct.s_d));
    for (name, reduced, built) in pairs {
        if reduced != *built {
            return Err(WTypeError::ReductionMismatch { generator: name });
        }
    }
    Ok(direct)
}

/// Necessary relation checks for the action question over the residue
/// field: rotation invertibility, torus multiplicativity and exchange, and
/// the commuting/braid relations among the reflection composites obtained
/// by conjugating the last reflection with rotation powers.  A full pass
/// is necessary, not sufficient, for the formulas to define an action.
pub fn validate_action(module: &WTypeModule) -> RelationReport {
    let t_closure = |e: &[i64]| -> Matrix<FqElement> {
        torus_matrix(module.d, module.q, &module.theta_exp, e)
            .expect("digit tuples constructed with correct length")
    };
    run_relation_checks(RelationInputs {
        d: module.d,
        zeta_order: zeta_order(module.q),
        u: &module.u,
        u_inv: &module.u_inv,
        s_d: &module.s_d,
        s: None,
        t_of: &t_closure,
    })
}

/// An antisymmetric increment function on W with values in [-r, r]: zero,
/// interior, or extreme on the ascent set exactly as the sign data
/// dictates, negated across s_d, and satisfying the two exchange
/// conditions that make word sums well defined.
#[derive(Clone, PartialEq, Eq)]
pub struct PartialFunction {
    d: usize,
    r: i64,
    values: Vec<i64>,
}

impl PartialFunction {
    pub fn new(
        d: usize,
        r: i64,
        values: Vec<i64>,
        sigma: &SigmaFunction,
    ) -> Result<Self, WTypeError> {
        let perms = Permutation::enumerate(d)?;
        if values.len() != perms.len() || sigma.d() != d {
            return Err(WTypeError::DegreeMismatch { d });
        }
        let partial = PartialFunction { d, r, values };
        partial.check_against(sigma)?;
        Ok(partial)
    }

    /// Re-validates every invariant against the given sign data.
    pub fn check_against(&self, sigma: &SigmaFunction) -> Result<(), WTypeError> {
        let d = self.d;
        let r = self.r;
        let perms = Permutation::enumerate(d)?;
        for w in &perms {
            let v = self.values[w.lex_rank()];
            if v.abs() > r {
                return Err(WTypeError::PartialRange { w: w.to_string(), value: v, r });
            }
            let ws = w.times_s(d)?;
            if self.values[ws.lex_rank()] != -v {
                return Err(WTypeError::PartialAntisymmetry { w: w.to_string() });
            }
            if w.ascends_at(d) {
                let s = sigma
                    .value(w)
                    .ok_or_else(|| WTypeError::SigmaDomain { w: w.to_string() })?;
                let compatible = match s {
                    1 => v == 0,
                    0 => 0 < v && v < r,
                    -1 => v == r,
                    _ => false,
                };
                if !compatible {
                    return Err(WTypeError::SigmaIncompatible {
                        w: w.to_string(),
                        value: v,
                        sigma: s,
                    });
                }
            }
        }
        // Exchange condition for distant generator pairs.
        for w in &perms {
            for i in 1..=d {
                for j in (i + 2)..=d {
                    let lhs = self.at(&w.compose(&Permutation::ubar_pow(d, (d - i) as i64))?)
                        + self.at(
                            &w.times_s(i)?
                                .compose(&Permutation::ubar_pow(d, (d - j) as i64))?,
                        );
                    let rhs = self.at(&w.compose(&Permutation::ubar_pow(d, (d - j) as i64))?)
                        + self.at(
                            &w.times_s(j)?
                                .compose(&Permutation::ubar_pow(d, (d - i) as i64))?,
                        );
                    if lhs != rhs {
                        return Err(WTypeError::Cocycle { rule: 26, w: w.to_string(), i, j });
                    }
                }
            }
        }
        // Exchange condition for adjacent generator pairs.
        for w in &perms {
            for i in 1..d {
                let p = |k: i64| Permutation::ubar_pow(d, k);
                let di = (d - i) as i64;
                let lhs = self.at(&w.compose(&p(di))?)
                    + self.at(&w.times_s(i)?.compose(&p(di - 1))?)
                    + self.at(&w.times_s(i)?.times_s(i + 1)?.compose(&p(di))?);
                let rhs = self.at(&w.compose(&p(di - 1))?)
                    + self.at(&w.times_s(i + 1)?.compose(&p(di))?)
                    + self.at(&w.times_s(i + 1)?.times_s(i)?.compose(&p(di - 1))?);
                if lhs != rhs {
                    return Err(WTypeError::Cocycle { rule: 27, w: w.to_string(), i, j: i + 1 });
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn at(&self, w: &Permutation) -> i64 {
        self.values[w.lex_rank()]
    }

    /// The word sum for a pair: along an expression v = s_{i_1} ... s_{i_M}
    /// (not necessarily reduced), sum the increments at
    /// w s_{i_1} ... s_{i_{m-1}} ubar^{d-i_m}.
    pub fn pair_value_via_word(
        &self,
        w: &Permutation,
        word: &[usize],
    ) -> Result<i64, WTypeError> {
        let d = self.d;
        let mut prefix = w.clone();
        let mut sum = 0i64;
        for &i in word {
            let shifted = prefix.compose(&Permutation::ubar_pow(d, (d - i) as i64))?;
            sum += self.at(&shifted);
            prefix = prefix.times_s(i)?;
        }
        Ok(sum)
    }

    /// The word sum evaluated on a reduced word of v.  Well-definedness
    /// across expressions is a consequence of the exchange conditions and
    /// is exercised separately.
    pub fn pair_value(&self, w: &Permutation, v: &Permutation) -> Result<i64, WTypeError> {
        self.pair_value_via_word(w, v.reduced_word().letters())
    }
}

impl std::fmt::Debug for PartialFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PartialFunction(d={}, r={}, {:?})", self.d, self.r, self.values)
    }
}

/// All reduced words of w (right-descent recursion), capped at `cap`.
/// Used to exercise word independence of the pair sums.
pub fn reduced_words_capped(w: &Permutation, cap: usize) -> Vec<Vec<usize>> {
    if w.is_identity() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 1..=w.d() {
        if !w.ascends_at(i) {
            let shorter = w.times_s(i).expect("generator index in range");
            for mut word in reduced_words_capped(&shorter, cap) {
                word.push(i);
                out.push(word);
                if out.len() >= cap {
                    return out;
                }
            }
        }
    }
    out
}

/// Realizes a module from increment data: word sums define a cocycle,
/// whose potential (normalized to vanish at the identity) is the
/// rescaling function; the rotation increments and the given units then
/// determine the character.  The reduction of the realized lattice is
/// compared against the directly built module before returning.
pub fn silvester_realize(
    theta_exp: &[i64],
    sigma: &SigmaFunction,
    eps: &[FqElement],
    partial: &PartialFunction,
) -> Result<(CharacterData, NablaFunction), WTypeError> {
    let d = sigma.d();
    let perms = Permutation::enumerate(d)?;
    if partial.d() != d || theta_exp.len() != d + 1 || eps.len() != perms.len() {
        return Err(WTypeError::DegreeMismatch { d });
    }
    let q = eps[0].q();
    let r = partial.r();
    partial.check_against(sigma)?;

    // Units must be constant on w(0)-classes, i.e. invariant under the
    // generators fixing 0.
    for w in &perms {
        for i in 2..=d {
            let ws = w.times_s(i)?;
            if eps[w.lex_rank()] != eps[ws.lex_rank()] {
                return Err(WTypeError::EpsilonHypothesis { w: w.to_string(), i });
            }
        }
    }

    // Potential of the word-sum cocycle, normalized at the identity.
    let mut values = vec![0i64; perms.len()];
    let e = Permutation::identity(d);
    for w in &perms {
        values[w.lex_rank()] = -partial.pair_value(&e, w)?;
    }
    let nabla = NablaFunction::from_values(d, values)?;

    // Generator consistency: the potential must reproduce every one-letter
    // word sum, which is exactly word independence of the construction.
    for w in &perms {
        for i in 1..=d {
            let ws = w.times_s(i)?;
            let increment =
                partial.at(&w.compose(&Permutation::ubar_pow(d, (d - i) as i64))?);
            if nabla.value(w) - nabla.value(&ws) != increment {
                return Err(WTypeError::WordIndependence { v: ws.to_string() });
            }
        }
    }

    // Rotation increments must be constant on w(0)-classes; they give the
    // pi-orders of the character, the units give its zeta-exponents.
    let ubar_inv = Permutation::ubar_pow(d, -1);
    let mut per_slot: Vec<Option<i64>> = vec![None; d + 1];
    for w in &perms {
        let slot = w.apply(0);
        let inc = nabla.value(&w.compose(&ubar_inv)?) - nabla.value(w);
        match per_slot[slot] {
            None => per_slot[slot] = Some(inc),
            Some(known) if known == inc => {}
            Some(_) => return Err(WTypeError::ThetaInconsistent { slot }),
        }
    }
    let mut pi_ord = vec![0i64; d + 1];
    let mut unit_exp = vec![0i64; d + 1];
    for j in 0..=d {
        let slot = crate::psmod::ubar_power_slot(d, j);
        pi_ord[j] = per_slot[slot].expect("every slot is hit");
        let rank = Permutation::ubar_pow(d, j as i64).lex_rank();
        unit_exp[j] = eps[rank].dlog().expect("validated nonzero") as i64;
    }
    let character = CharacterData::new(theta_exp.to_vec(), pi_ord, unit_exp, q, r)?;

    // Round trip: the reduction of the realized lattice must equal the
    // directly built module.
    let reduced = reduce_lattice(&character, &nabla)?;
    let direct = make_wtype_module(theta_exp, sigma, eps, q)?;
    let mut pairs: Vec<(String, &Matrix<FqElement>, &Matrix<FqElement>)> = Vec::new();
    for (j, t) in reduced.t_basis().iter().enumerate() {
        pairs.push((format!("T_t[digit {j}]"), t, &direct.t_basis[j]));
    }
    pairs.push(("T_u".into(), &reduced.u, &direct.u));
    pairs.push(("T_u_inv".into(), &reduced.u_inv, &direct.u_inv));
    pairs.push((format!("T_s{d}"), &reduced.s_d, &direct.s_d));
    for (name, a, b) in pairs {
        if a != b {
            return Err(WTypeError::RoundTrip { generator: name });
        }
    }
    Ok((character, nabla))
}

/// Searches for an increment function compatible with the sign data.  For
/// d <= 2 the direct recipe applies (zero, smallest interior value, or the
/// extreme, by sign; antisymmetric extension) and the exchange conditions
/// hold automatically; they are still machine-checked.  For d >= 3 an
/// exhaustive smallest-first backtracking over sign-compatible values runs
/// the full validation at each leaf.  None means exhaustion (in
/// particular: a zero sign with r = 1 leaves no interior value).
pub fn search_partial(
    sigma: &SigmaFunction,
    r: i64,
    d: usize,
) -> Result<Option<PartialFunction>, WTypeError> {
    if sigma.d() != d {
        return Err(WTypeError::DegreeMismatch { d });
    }
    let perms = Permutation::enumerate(d)?;
    let ascent: Vec<&Permutation> = perms.iter().filter(|w| w.ascends_at(d)).collect();
    let mut candidates: Vec<Vec<i64>> = Vec::with_capacity(ascent.len());
    for w in &ascent {
        let s = sigma
            .value(w)
            .ok_or_else(|| WTypeError::SigmaDomain { w: w.to_string() })?;
        let domain: Vec<i64> = match s {
            1 => vec![0],
            0 => (1..r).collect(),
            _ => vec![r],
        };
        if domain.is_empty() {
            return Ok(None);
        }
        candidates.push(domain);
    }

    let build = |choice: &[i64]| -> Result<PartialFunction, WTypeError> {
        let mut values = vec![0i64; perms.len()];
        for (w, &v) in ascent.iter().zip(choice) {
            values[w.lex_rank()] = v;
            values[w.times_s(d)?.lex_rank()] = -v;
        }
        PartialFunction::new(d, r, values, sigma)
    };

    if d <= 2 {
        let choice: Vec<i64> = candidates.iter().map(|c| c[0]).collect();
        return Ok(Some(build(&choice)?));
    }

    // Smallest-first depth search with validation at the leaves.
    let mut indices = vec![0usize; ascent.len()];
    loop {
        let choice: Vec<i64> =
            indices.iter().zip(&candidates).map(|(&k, c)| c[k]).collect();
        if let Ok(partial) = build(&choice) {
            return Ok(Some(partial));
        }
        let mut pos = ascent.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            if indices[pos] + 1 < candidates[pos].len() {
                indices[pos] += 1;
                for idx in indices.iter_mut().skip(pos + 1) {
                    *idx = 0;
                }
                break;
            }
        }
    }
}

/// Wire format for increment functions, keyed by one-line permutation
/// strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartialJson {
    pub d: usize,
    pub r: i64,
    pub values: BTreeMap<String, i64>,
}

impl From<&PartialFunction> for PartialJson {
    fn from(p: &PartialFunction) -> Self {
        let perms = Permutation::enumerate(p.d()).expect("degree bounded at construction");
        let values = perms.iter().map(|w| (w.to_string(), p.at(w))).collect();
        PartialJson { d: p.d(), r: p.r(), values }
    }
}

impl PartialJson {
    /// Rebuilds the raw value table; invariants are re-checked against
    /// sign data by the caller via [`PartialFunction::new`].
    pub fn values_by_rank(&self) -> Result<Vec<i64>, WTypeError> {
        let perms = Permutation::enumerate(self.d)?;
        let mut values = vec![0i64; perms.len()];
        for w in &perms {
            let key = w.to_string();
            let v = self
                .values
                .get(&key)
                .ok_or(WTypeError::DegreeMismatch { d: self.d })?;
            values[w.lex_rank()] = *v;
        }
        Ok(values)
    }
}

/// Wire format for the module: descriptor plus generator matrices as
/// (row, col, residue-element) triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WTypeModuleJson {
    pub d: usize,
    pub q: u32,
    pub theta_exp: Vec<i64>,
    pub sigma: BTreeMap<String, i8>,
    pub eps: BTreeMap<String, u32>,
    pub t_basis: Vec<Vec<(usize, usize, u32)>>,
    pub u: Vec<(usize, usize, u32)>,
    pub u_inv: Vec<(usize, usize, u32)>,
    pub s_d: Vec<(usize, usize, u32)>,
}

impl From<&WTypeModule> for WTypeModuleJson {
    fn from(m: &WTypeModule) -> Self {
        let perms = Permutation::enumerate(m.d).expect("degree bounded at construction");
        let triples = |mat: &Matrix<FqElement>| -> Vec<(usize, usize, u32)> {
            mat.nonzero_entries().map(|(i, j, e)| (i, j, e.repr())).collect()
        };
        let mut sigma = BTreeMap::new();
        for w in &perms {
            if let Some(s) = m.sigma.value(w) {
                sigma.insert(w.to_string(), s);
            }
        }
        let eps =
            perms.iter().map(|w| (w.to_string(), m.eps[w.lex_rank()].repr())).collect();
        WTypeModuleJson {
            d: m.d,
            q: m.q,
            theta_exp: m.theta_exp.clone(),
            sigma,
            eps,
            t_basis: m.t_basis.iter().map(&triples).collect(),
            u: triples(&m.u),
            u_inv: triples(&m.u_inv),
            s_d: triples(&m.s_d),
        }
    }
}
