//! Torus characters, Hecke operator matrices on the principal-series fixed
//! space, lattice stability, the unitarity criterion, and duality.
//!
//! The fixed space has basis {f_w} indexed by W.  Operators are stored as
//! dense matrices over [`Scalar`] acting on column vectors, so composition
//! of operators is the matrix product in the same order.  Columns follow
//! the lexicographic rank of W; the column of f_w lists the coefficients of
//! the image of f_w.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterError, Permutation};
use crate::matrix::Matrix;
use crate::nabla::NablaFunction;
use crate::scalars::{FqElement, Scalar, ScalarError, ScalarParams};
use crate::weights::{BalancedWeight, BoundSide};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PsmodError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("component lists must all have length d+1 >= 2, got {0}, {1}, {2}")]
    LengthMismatch(usize, usize, usize),
    #[error("invalid generator descriptor: {0}")]
    BadGenerator(String),
    #[error("degree mismatch: module on d = {0}, data on d = {1}")]
    DegreeMismatch(usize, usize),
    #[error("lattice is not stable: {0}")]
    Unstable(StabilityWitness),
    #[error("unitarity criterion fails: {0}")]
    CriterionViolated(CriterionViolation),
}

/// A non-integral matrix entry found while testing stability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityWitness {
    pub generator: String,
    pub row: String,
    pub col: String,
    pub entry: String,
}

impl std::fmt::Display for StabilityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "generator {} maps g_({}) with non-integral coefficient {} on g_({})",
            self.generator, self.col, self.entry, self.row
        )
    }
}

/// Witness for a failed unitarity test: either the total pi-order is not
/// zero, or a subset inequality fails on the slot-ordered pi-orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CriterionViolation {
    SumNonZero { sum: i64 },
    Subset { subset: Vec<usize>, side: BoundSide, sum: i64, bound: i64 },
}

impl std::fmt::Display for CriterionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriterionViolation::SumNonZero { sum } => {
                write!(f, "pi-orders sum to {sum}, not 0")
            }
            CriterionViolation::Subset { subset, side, sum, bound } => match side {
                BoundSide::Upper => {
                    write!(f, "slots {subset:?} have pi-order sum {sum} > bound {bound}")
                }
                BoundSide::Lower => {
                    write!(f, "slots {subset:?} have pi-order sum {sum} < bound {bound}")
                }
            },
        }
    }
}

/// Index of the rotation power i with t_{ubar^i} carrying the uniformizer
/// at diagonal slot c; inverse of i -> ubar^i(0).
pub fn ubar_index_for_slot(d: usize, c: usize) -> usize {
    debug_assert!(c <= d);
    if c == 0 {
        0
    } else {
        d + 1 - c
    }
}

/// ubar^i(0) as a diagonal slot.
pub fn ubar_power_slot(d: usize, i: usize) -> usize {
    debug_assert!(i <= d);
    (d + 1 - i) % (d + 1)
}

/// A character of the diagonal torus, tame along units.  Components are
/// indexed by diagonal slots; the free part is recorded on the rotation
/// elements t_{ubar^i} as Theta(t_{ubar^i}) = zeta^{u_i} pi^{m_i}, and the
/// unit part theta by exponent tuples a_j on Teichmueller digits.
#[derive(Clone, PartialEq, Eq)]
pub struct CharacterData {
    d: usize,
    q: u32,
    r: i64,
    theta_exp: Vec<i64>,
    pi_ord: Vec<i64>,
    unit_exp: Vec<i64>,
}

impl CharacterData {
    pub fn new(
        theta_exp: Vec<i64>,
        pi_ord: Vec<i64>,
        unit_exp: Vec<i64>,
        q: u32,
        r: i64,
    ) -> Result<Self, PsmodError> {
        let params = ScalarParams::new(q, r)?;
        let len = theta_exp.len();
        if len < 2 || pi_ord.len() != len || unit_exp.len() != len {
            return Err(PsmodError::LengthMismatch(len, pi_ord.len(), unit_exp.len()));
        }
        let n = params.zeta_order() as i64;
        let reduce = |v: Vec<i64>| v.into_iter().map(|x| x.rem_euclid(n)).collect();
        Ok(CharacterData {
            d: len - 1,
            q,
            r,
            theta_exp: reduce(theta_exp),
            pi_ord,
            unit_exp: reduce(unit_exp),
        })
    }

    /// Character with trivial unit parts whose rotation pi-orders integrate
    /// the given weight: m_i = -n_{(i-1) mod (d+1)}.
    pub fn from_weight(weight: &BalancedWeight, q: u32) -> Result<Self, PsmodError> {
        let d = weight.d();
        let m: Vec<i64> =
            (0..=d).map(|i| -weight.entry((i + d) % (d + 1))).collect();
        Self::new(vec![0; d + 1], m, vec![0; d + 1], q, weight.r())
    }

    pub fn trivial(d: usize, q: u32, r: i64) -> Result<Self, PsmodError> {
        Self::new(vec![0; d + 1], vec![0; d + 1], vec![0; d + 1], q, r)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn theta_exp(&self) -> &[i64] {
        &self.theta_exp
    }

    pub fn pi_ord(&self) -> &[i64] {
        &self.pi_ord
    }

    pub fn unit_exp(&self) -> &[i64] {
        &self.unit_exp
    }

    pub fn params(&self) -> ScalarParams {
        ScalarParams::new(self.q, self.r).expect("validated at construction")
    }

    /// pi-order of Theta on the rotation element carrying the uniformizer
    /// at slot c.
    pub fn pi_ord_at_slot(&self, c: usize) -> i64 {
        self.pi_ord[ubar_index_for_slot(self.d, c)]
    }

    pub fn unit_exp_at_slot(&self, c: usize) -> i64 {
        self.unit_exp[ubar_index_for_slot(self.d, c)]
    }

    /// Theta(t_w) as (zeta exponent, pi exponent); t_w is diagonal with the
    /// uniformizer at slot w(0).
    pub fn theta_of_tw(&self, w: &Permutation) -> (i64, i64) {
        let c = w.apply(0);
        (self.unit_exp_at_slot(c), self.pi_ord_at_slot(c))
    }

    pub fn scalar_of_tw(&self, w: &Permutation) -> Scalar {
        let (u, m) = self.theta_of_tw(w);
        Scalar::monomial(self.params(), u, m)
    }

    /// theta(w t^{-1} w^{-1}) for t with digit exponents e (t_j = g^{e_j}):
    /// zeta^{-sum_k a_{w(k)} e_k}.
    pub fn theta_conjugated_inverse_exp(&self, w: &Permutation, digit_exp: &[i64]) -> i64 {
        debug_assert_eq!(digit_exp.len(), self.d + 1);
        let s: i64 =
            (0..=self.d).map(|k| self.theta_exp[w.apply(k)] * digit_exp[k]).sum();
        -s
    }

    /// True when the component exponents at slots w(i-1), w(i) differ, i.e.
    /// theta is nontrivial on the coroot through s_i conjugated by w.
    pub fn is_regular_at(&self, w: &Permutation, i: usize) -> bool {
        let n = (self.q as i64 - 1).max(1);
        let a = self.theta_exp[w.apply(i - 1)];
        let b = self.theta_exp[w.apply(i)];
        (a - b).rem_euclid(n) != 0
    }

    /// kappa_{w,s_i} = theta of the diagonal sign matrix with -1 at slot
    /// w(i-1); computed as zeta^(a_{w(i-1)} * dlog(-1)), which is +-1.
    pub fn kappa(&self, w: &Permutation, i: usize) -> Scalar {
        let e = FqElement::from_int(self.q, -1)
            .expect("q validated")
            .dlog()
            .expect("-1 is a unit") as i64;
        Scalar::zeta_pow(self.params(), self.theta_exp[w.apply(i - 1)] * e)
    }

    /// Same sign as an exponent of zeta (used on the mod-p side).
    pub fn kappa_exp(&self, w: &Permutation, i: usize) -> i64 {
        let e = FqElement::from_int(self.q, -1)
            .expect("q validated")
            .dlog()
            .expect("-1 is a unit") as i64;
        self.theta_exp[w.apply(i - 1)] * e
    }

    /// The weight integrated by any stable lattice for this character:
    /// n_i = -m_{(i+1) mod (d+1)}.
    pub fn weight(&self) -> Vec<i64> {
        (0..=self.d).map(|i| -self.pi_ord[(i + 1) % (self.d + 1)]).collect()
    }
}

impl std::fmt::Debug for CharacterData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CharacterData(d={}, q={}, r={}, a={:?}, m={:?}, u={:?})",
            self.d, self.q, self.r, self.theta_exp, self.pi_ord, self.unit_exp
        )
    }
}

/// Wire format for characters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterJson {
    pub d: usize,
    pub q: u32,
    pub r: i64,
    pub theta_exp: Vec<i64>,
    pub pi_ord: Vec<i64>,
    pub unit_exp: Vec<i64>,
}

impl From<&CharacterData> for CharacterJson {
    fn from(c: &CharacterData) -> Self {
        CharacterJson {
            d: c.d,
            q: c.q,
            r: c.r,
            theta_exp: c.theta_exp.clone(),
            pi_ord: c.pi_ord.clone(),
            unit_exp: c.unit_exp.clone(),
        }
    }
}

impl CharacterJson {
    pub fn validate(&self) -> Result<CharacterData, PsmodError> {
        let c = CharacterData::new(
            self.theta_exp.clone(),
            self.pi_ord.clone(),
            self.unit_exp.clone(),
            self.q,
            self.r,
        )?;
        if c.d() != self.d {
            return Err(PsmodError::DegreeMismatch(self.d, c.d()));
        }
        Ok(c)
    }
}

/// Descriptor for a Hecke generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeckeGenerator {
    /// T_{s_i}, 1 <= i <= d.
    S(usize),
    /// T_u (rotation forward).
    U,
    /// T_{u^{-1}}.
    UInv,
    /// Torus operator for the diagonal element with digit exponents e
    /// (slot j holds g^{e_j}).
    T(Vec<i64>),
}

impl std::fmt::Display for HeckeGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeckeGenerator::S(i) => write!(f, "T_s{i}"),
            HeckeGenerator::U => write!(f, "T_u"),
            HeckeGenerator::UInv => write!(f, "T_u_inv"),
            HeckeGenerator::T(e) => write!(f, "T_t{e:?}"),
        }
    }
}

/// The matrix of a generator on the basis {f_w}, columns by lexicographic
/// rank.  The three-case formula for T_{s_i} (image basis vector on an
/// ascent; q times it on a regular descent; additionally a diagonal
/// kappa-signed q-1 term on a non-regular descent), the monomial formulas
/// for the rotations, and the diagonal character values for torus elements.
pub fn operator_matrix(
    c: &CharacterData,
    generator: &HeckeGenerator,
) -> Result<Matrix<Scalar>, PsmodError> {
    let d = c.d;
    let params = c.params();
    let perms = Permutation::enumerate(d)?;
    let size = perms.len();
    let zero = Scalar::zero(params);
    let mut m = Matrix::zero(size, size, &zero);
    match generator {
        HeckeGenerator::S(i) => {
            let i = *i;
            if i < 1 || i > d {
                return Err(PsmodError::BadGenerator(format!("s_{i} with d = {d}")));
            }
            for w in &perms {
                let ws = w.times_s(i)?;
                let col = w.lex_rank();
                if w.ascends_at(i) {
                    m.set(ws.lex_rank(), col, Scalar::one(params));
                } else {
                    m.set(ws.lex_rank(), col, Scalar::from_int(params, c.q as i64));
                    if !c.is_regular_at(w, i) {
                        let kappa = c.kappa(&ws, i);
                        let coeff = &kappa * &Scalar::from_int(params, c.q as i64 - 1);
                        m.set(col, col, coeff);
                    }
                }
            }
        }
        HeckeGenerator::U => {
            let ubar = Permutation::ubar(d);
            for w in &perms {
                let wu = w.compose(&ubar)?;
                let (u, ord) = c.theta_of_tw(&wu);
                m.set(wu.lex_rank(), w.lex_rank(), Scalar::monomial(params, -u, -ord));
            }
        }
        HeckeGenerator::UInv => {
            let ubar_inv = Permutation::ubar_pow(d, -1);
            for w in &perms {
                let wui = w.compose(&ubar_inv)?;
                m.set(wui.lex_rank(), w.lex_rank(), c.scalar_of_tw(w));
            }
        }
        HeckeGenerator::T(digit_exp) => {
            if digit_exp.len() != d + 1 {
                return Err(PsmodError::BadGenerator(format!(
                    "torus digits of length {} with d = {d}",
                    digit_exp.len()
                )));
            }
            for w in &perms {
                let e = c.theta_conjugated_inverse_exp(w, digit_exp);
                m.set(w.lex_rank(), w.lex_rank(), Scalar::zeta_pow(params, e));
            }
        }
    }
    Ok(m)
}

/// A bundle of generator matrices over one basis.  `nabla` records the
/// rescaling when the matrices are in the lattice basis g_w = pi^nabla(w)
/// f_w; None means the plain f-basis.
#[derive(Clone)]
pub struct HeckeModule {
    character: CharacterData,
    nabla: Option<NablaFunction>,
    t_basis: Vec<Matrix<Scalar>>,
    u: Matrix<Scalar>,
    u_inv: Matrix<Scalar>,
    s: Vec<Matrix<Scalar>>,
}

impl HeckeModule {
    /// All generator matrices in the f-basis.
    pub fn in_f_basis(c: &CharacterData) -> Result<Self, PsmodError> {
        let d = c.d;
        let mut t_basis = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let mut e = vec![0i64; d + 1];
            e[j] = 1;
            t_basis.push(operator_matrix(c, &HeckeGenerator::T(e))?);
        }
        let u = operator_matrix(c, &HeckeGenerator::U)?;
        let u_inv = operator_matrix(c, &HeckeGenerator::UInv)?;
        let mut s = Vec::with_capacity(d);
        for i in 1..=d {
            s.push(operator_matrix(c, &HeckeGenerator::S(i))?);
        }
        Ok(HeckeModule { character: c.clone(), nabla: None, t_basis, u, u_inv, s })
    }

    pub fn character(&self) -> &CharacterData {
        &self.character
    }

    pub fn d(&self) -> usize {
        self.character.d
    }

    pub fn nabla(&self) -> Option<&NablaFunction> {
        self.nabla.as_ref()
    }

    pub fn t_basis(&self) -> &[Matrix<Scalar>] {
        &self.t_basis
    }

    pub fn u(&self) -> &Matrix<Scalar> {
        &self.u
    }

    pub fn u_inv(&self) -> &Matrix<Scalar> {
        &self.u_inv
    }

    /// T_{s_i}; i is 1-based.
    pub fn s(&self, i: usize) -> &Matrix<Scalar> {
        &self.s[i - 1]
    }

    pub fn s_d(&self) -> &Matrix<Scalar> {
        &self.s[self.character.d - 1]
    }

    /// Torus matrix for arbitrary digit exponents in the module's basis
    /// (diagonal, hence unaffected by rescaling).
    pub fn t_matrix(&self, digit_exp: &[i64]) -> Result<Matrix<Scalar>, PsmodError> {
        operator_matrix(&self.character, &HeckeGenerator::T(digit_exp.to_vec()))
    }
}

/// Rescales every generator matrix to the lattice basis g_w = pi^nabla(w)
/// f_w: the (v, w) entry picks up pi^(nabla(w) - nabla(v)).
pub fn rebase_to_lattice(
    module: &HeckeModule,
    nabla: &NablaFunction,
) -> Result<HeckeModule, PsmodError> {
    let d = module.d();
    if nabla.d() != d {
        return Err(PsmodError::DegreeMismatch(d, nabla.d()));
    }
    let params = module.character.params();
    let perms = Permutation::enumerate(d)?;
    let shift: Vec<i64> = {
        let mut v = vec![0i64; perms.len()];
        for w in &perms {
            v[w.lex_rank()] = nabla.value(w);
        }
        v
    };
    let rebase = |m: &Matrix<Scalar>| -> Matrix<Scalar> {
        Matrix::from_fn(m.rows(), m.cols(), |v, w| {
            let entry = m.at(v, w);
            if entry.is_zero() {
                entry.clone()
            } else {
                entry * &Scalar::monomial(params, 0, shift[w] - shift[v])
            }
        })
    };
    Ok(HeckeModule {
        character: module.character.clone(),
        nabla: Some(nabla.clone()),
        t_basis: module.t_basis.iter().map(&rebase).collect(),
        u: rebase(&module.u),
        u_inv: rebase(&module.u_inv),
        s: module.s.iter().map(&rebase).collect(),
    })
}

/// Stability of the lattice spanned by the g_w: every entry of every
/// generating operator (torus basis, both rotations, and the last
/// reflection) must be integral.
pub fn is_lattice_stable(c: &CharacterData, nabla: &NablaFunction) -> Result<(), PsmodError> {
    let module = rebase_to_lattice(&HeckeModule::in_f_basis(c)?, nabla)?;
    let perms = Permutation::enumerate(module.d())?;
    let labels: Vec<String> = perms.iter().map(|w| w.to_string()).collect();
    let mut named: Vec<(String, &Matrix<Scalar>)> = Vec::new();
    for (j, t) in module.t_basis.iter().enumerate() {
        named.push((format!("T_t[digit {j}]"), t));
    }
    named.push(("T_u_inv".into(), &module.u_inv));
    named.push(("T_u".into(), &module.u));
    named.push((format!("T_s{}", module.d()), module.s_d()));
    for (name, matrix) in named {
        for (v, w, entry) in matrix.nonzero_entries() {
            if !entry.is_integral() {
                return Err(PsmodError::Unstable(StabilityWitness {
                    generator: name,
                    row: labels[v].clone(),
                    col: labels[w].clone(),
                    entry: entry.to_string(),
                }));
            }
        }
    }
    Ok(())
}

/// One verified identity in a relation report.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&RelationCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Relation suite shared by the characteristic-zero and mod-p sides.
///
/// `s` carries explicit matrices for every T_{s_i} when available; when
/// absent, the composites dictated by s_i = u^{d-i} s_d u^{i-d} stand in
/// for them and the conjugation identity itself is skipped (it would be a
/// tautology).
pub(crate) struct RelationInputs<'a, T: crate::matrix::RingElem> {
    pub d: usize,
    pub zeta_order: i64,
    pub u: &'a Matrix<T>,
    pub u_inv: &'a Matrix<T>,
    pub s_d: &'a Matrix<T>,
    pub s: Option<&'a [Matrix<T>]>,
    pub t_of: &'a dyn Fn(&[i64]) -> Matrix<T>,
}

pub(crate) fn run_relation_checks<T: crate::matrix::RingElem>(
    inp: RelationInputs<'_, T>,
) -> RelationReport {
    let d = inp.d;
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool, detail: Option<String>| {
        checks.push(RelationCheck { name, passed, detail });
    };

    // Composite reflections via conjugation by rotation powers.
    let composite = |i: usize| -> Matrix<T> {
        let k = d - i;
        inp.u_inv.pow(k).matmul(inp.s_d).matmul(&inp.u.pow(k))
    };
    let s_list: Vec<Matrix<T>> = match inp.s {
        Some(list) => list.to_vec(),
        None => (1..=d).map(composite).collect(),
    };

    // (R1) distant reflections commute.
    for i in 1..=d {
        for j in (i + 2)..=d {
            let lhs = s_list[i - 1].matmul(&s_list[j - 1]);
            let rhs = s_list[j - 1].matmul(&s_list[i - 1]);
            push(format!("R1(s{i},s{j})"), lhs == rhs, None);
        }
    }
    // (R2) braid identity for adjacent reflections.
    for i in 1..d {
        let a = &s_list[i - 1];
        let b = &s_list[i];
        let lhs = a.matmul(b).matmul(a);
        let rhs = b.matmul(a).matmul(b);
        push(format!("R2(s{i},s{})", i + 1), lhs == rhs, None);
    }
    // (R3) rotations invert each other.
    let fwd = inp.u.matmul(inp.u_inv);
    let bwd = inp.u_inv.matmul(inp.u);
    push("R3(u; u_inv)".into(), fwd.is_identity() && bwd.is_identity(), None);
    // (R4) conjugation: explicit s_i against the composite.
    if inp.s.is_some() {
        for i in 1..=d {
            let got = composite(i);
            push(format!("R4(s{i})"), got == s_list[i - 1], None);
        }
    }
    // (R5) torus multiplicativity on basis digit pairs.
    for j in 0..=d {
        for k in 0..=d {
            let mut ej = vec![0i64; d + 1];
            ej[j] = 1;
            let mut ek = vec![0i64; d + 1];
            ek[k] = 1;
            let mut sum = vec![0i64; d + 1];
            sum[j] += 1;
            sum[k] += 1;
            for v in &mut sum {
                *v = v.rem_euclid(inp.zeta_order.max(1));
            }
            let lhs = (inp.t_of)(&ej).matmul(&(inp.t_of)(&ek));
            let rhs = (inp.t_of)(&sum);
            push(format!("R5(t{j},t{k})"), lhs == rhs, None);
        }
    }
    // (R6) torus exchange through the last reflection: conjugating the
    // torus element by s_d swaps its last two digits.
    for k in 0..=d {
        let mut e = vec![0i64; d + 1];
        e[k] = 1;
        let mut swapped = e.clone();
        swapped.swap(d - 1, d);
        let lhs = (inp.t_of)(&e).matmul(inp.s_d);
        let rhs = inp.s_d.matmul(&(inp.t_of)(&swapped));
        push(format!("R6(t{k})"), lhs == rhs, None);
    }
    RelationReport { checks }
}

/// Verifies the generator identities (commuting and braid relations,
/// rotation invertibility, conjugation to the last reflection, torus
/// multiplicativity, torus exchange) as exact matrix identities.
pub fn check_relations(module: &HeckeModule) -> Result<RelationReport, PsmodError> {
    let c = &module.character;
    let t_closure = |e: &[i64]| -> Matrix<Scalar> {
        module.t_matrix(e).expect("digit tuples constructed with correct length")
    };
    Ok(run_relation_checks(RelationInputs {
        d: c.d,
        zeta_order: c.params().zeta_order() as i64,
        u: &module.u,
        u_inv: &module.u_inv,
        s_d: module.s_d(),
        s: Some(&module.s),
        t_of: &t_closure,
    }))
}

/// Integer test for local unitarity of the character: the pi-orders
/// v_j = ord Theta_j(p_F) (slot-indexed) must satisfy, for every subset I
/// of slots,
///
/// ```text
/// r * delta(I)  >=  sum_{j in I} v_j  >=  -r * delta(complement of I)
/// ```
///
/// together with sum v_j = 0 (unitary central character).
pub fn unitarity_criterion(c: &CharacterData) -> Result<(), PsmodError> {
    let d = c.d;
    let v: Vec<i64> = (0..=d).map(|j| c.pi_ord_at_slot(j)).collect();
    let total: i64 = v.iter().sum();
    if total != 0 {
        return Err(PsmodError::CriterionViolated(CriterionViolation::SumNonZero { sum: total }));
    }
    let full: u32 = (1u32 << (d + 1)) - 1;
    for mask in 0..=full {
        let subset: Vec<usize> = (0..=d).filter(|&j| mask & (1 << j) != 0).collect();
        let comp: Vec<usize> = (0..=d).filter(|&j| mask & (1 << j) == 0).collect();
        let sum: i64 = subset.iter().map(|&j| v[j]).sum();
        let upper = c.r * crate::weights::delta(&subset);
        if sum > upper {
            return Err(PsmodError::CriterionViolated(CriterionViolation::Subset {
                subset,
                side: BoundSide::Upper,
                sum,
                bound: upper,
            }));
        }
        let lower = -c.r * crate::weights::delta(&comp);
        if sum < lower {
            return Err(PsmodError::CriterionViolated(CriterionViolation::Subset {
                subset,
                side: BoundSide::Lower,
                sum,
                bound: lower,
            }));
        }
    }
    Ok(())
}

/// Data of the dual: unit parts inverted, pi-orders twisted by the modulus
/// character (pi-order r(d - 2c) at slot c).
pub fn dual_character(c: &CharacterData) -> CharacterData {
    let d = c.d;
    let n = (c.q as i64 - 1).max(1);
    let neg = |v: &[i64]| v.iter().map(|&x| (-x).rem_euclid(n)).collect::<Vec<_>>();
    let pi_ord = (0..=d)
        .map(|i| {
            let slot = ubar_power_slot(d, i) as i64;
            -c.pi_ord[i] - c.r * (d as i64 - 2 * slot)
        })
        .collect();
    CharacterData {
        d,
        q: c.q,
        r: c.r,
        theta_exp: neg(&c.theta_exp),
        pi_ord,
        unit_exp: neg(&c.unit_exp),
    }
}

/// Matrix export: list of [row, col, scalar] triples for nonzero entries.
pub fn matrix_json(m: &Matrix<Scalar>) -> serde_json::Value {
    let triples: Vec<serde_json::Value> = m
        .nonzero_entries()
        .map(|(i, j, s)| {
            serde_json::json!([i, j, crate::scalars::ScalarJson::from(s)])
        })
        .collect();
    serde_json::Value::Array(triples)
}
