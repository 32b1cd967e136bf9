//! Brute-force cross-checks of the closed-form operator matrices over an
//! explicit matrix model of the group.
//!
//! The local field is modeled as Laurent series over F_q (equal
//! characteristic).  Everything the operators depend on (q, valuations,
//! Teichmueller digits) is represented exactly in that model, and every
//! group element arising here is a finite matrix of finite series.  The
//! module decomposes group elements into cells, evaluates the basis
//! functions f_w literally from the decomposition, applies Hecke operators
//! as honest coset sums, and compares the result against
//! [`operator_matrix`].  Correctness, not speed, is the point: budgets are
//! q <= 5 and d <= 2 for the sums.

pub mod laurent;

use serde::Serialize;
use thiserror::Error;

use crate::coxeter::{CoxeterError, Permutation};
use crate::matrix::Matrix;
use crate::psmod::{operator_matrix, CharacterData, HeckeGenerator, PsmodError};
use crate::scalars::{FieldError, FqElement, Scalar, ScalarError};

pub use laurent::LaurentScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Psmod(#[from] PsmodError),
    #[error("precision exhausted: {context}")]
    Precision { context: String },
    #[error("singular matrix: {context}")]
    Singular { context: String },
    #[error("bad input: {0}")]
    BadInput(String),
}

/// Working precision for series arithmetic: divisions keep at least `n`
/// coefficients.  Exact operations stay exact regardless of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub n: i64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { n: 8 }
    }
}

impl OracleConfig {
    pub fn new(n: i64) -> Result<Self, OracleError> {
        if n < 2 {
            return Err(OracleError::BadInput(format!("precision must be >= 2, got {n}")));
        }
        Ok(OracleConfig { n })
    }

    pub fn doubled(self) -> Self {
        OracleConfig { n: self.n * 2 }
    }
}

/// A (d+1) x (d+1) matrix over the Laurent-series field.
#[derive(Clone, PartialEq)]
pub struct GroupElement {
    d: usize,
    q: u32,
    mat: Matrix<LaurentScalar>,
}

impl GroupElement {
    fn like(q: u32) -> Result<LaurentScalar, OracleError> {
        LaurentScalar::zero(q)
    }

    pub fn from_matrix(mat: Matrix<LaurentScalar>) -> Result<Self, OracleError> {
        if mat.rows() != mat.cols() || mat.rows() < 2 {
            return Err(OracleError::BadInput(format!(
                "group elements are square of size >= 2, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let q = mat.at(0, 0).q();
        Ok(GroupElement { d: mat.rows() - 1, q, mat })
    }

    pub fn identity(d: usize, q: u32) -> Result<Self, OracleError> {
        let like = Self::like(q)?;
        Ok(GroupElement { d, q, mat: Matrix::identity(d + 1, &like) })
    }

    /// The permutation matrix with column b supported at row w(b).
    pub fn permutation(q: u32, w: &Permutation) -> Result<Self, OracleError> {
        let d = w.d();
        let one = LaurentScalar::one(q)?;
        let mut g = Self::identity(d, q)?;
        g.mat = Matrix::zero(d + 1, d + 1, &Self::like(q)?);
        for b in 0..=d {
            g.mat.set(w.apply(b), b, one.clone());
        }
        Ok(g)
    }

    pub fn diagonal(entries: Vec<LaurentScalar>) -> Result<Self, OracleError> {
        if entries.len() < 2 {
            return Err(OracleError::BadInput("diagonal needs size >= 2".to_string()));
        }
        let q = entries[0].q();
        let d = entries.len() - 1;
        let mut g = Self::identity(d, q)?;
        for (j, e) in entries.into_iter().enumerate() {
            g.mat.set(j, j, e);
        }
        Ok(g)
    }

    /// Identity plus the entry c at (row, col), row != col.
    pub fn elementary(
        d: usize,
        row: usize,
        col: usize,
        c: &LaurentScalar,
    ) -> Result<Self, OracleError> {
        if row == col || row > d || col > d {
            return Err(OracleError::BadInput(format!(
                "elementary position ({row}, {col}) out of range for d = {d}"
            )));
        }
        let mut g = Self::identity(d, c.q())?;
        g.mat.set(row, col, c.clone());
        Ok(g)
    }

    /// The upper unipotent with b at the (i-1, i) spot, 1 <= i <= d.
    pub fn nu_s(d: usize, i: usize, b: &LaurentScalar) -> Result<Self, OracleError> {
        if i < 1 || i > d {
            return Err(OracleError::BadInput(format!("nu index {i} out of range for d = {d}")));
        }
        Self::elementary(d, i - 1, i, b)
    }

    /// The diagonal with a at slot i-1 and a^{-1} at slot i.  Intended for
    /// exact units; the inverse keeps 8 coefficients otherwise.
    pub fn h_s(d: usize, i: usize, a: &LaurentScalar) -> Result<Self, OracleError> {
        if i < 1 || i > d {
            return Err(OracleError::BadInput(format!("h index {i} out of range for d = {d}")));
        }
        let mut g = Self::identity(d, a.q())?;
        g.mat.set(i - 1, i - 1, a.clone());
        g.mat.set(i, i, a.invert(8)?);
        Ok(g)
    }

    /// The diagonal with -1 at slot i-1, 1 <= i <= d.
    pub fn delta_s(d: usize, q: u32, i: usize) -> Result<Self, OracleError> {
        if i < 1 || i > d {
            return Err(OracleError::BadInput(format!("delta index {i} out of range for d = {d}")));
        }
        let mut g = Self::identity(d, q)?;
        g.mat.set(i - 1, i - 1, LaurentScalar::constant(FqElement::from_int(q, -1)?)?);
        Ok(g)
    }

    /// The rotation element: 1 at (i, i+1) for i < d, the uniformizer at
    /// (d, 0).  Its (d+1)-st power is the uniformizer times the identity.
    pub fn rotation(d: usize, q: u32) -> Result<Self, OracleError> {
        let mut g = Self::identity(d, q)?;
        g.mat = Matrix::zero(d + 1, d + 1, &Self::like(q)?);
        let one = LaurentScalar::one(q)?;
        for i in 0..d {
            g.mat.set(i, i + 1, one.clone());
        }
        g.mat.set(d, 0, LaurentScalar::uniformizer(q)?);
        Ok(g)
    }

    /// Inverse of [`GroupElement::rotation`]: 1 at (i+1, i), t^{-1} at (0, d).
    pub fn rotation_inverse(d: usize, q: u32) -> Result<Self, OracleError> {
        let mut g = Self::identity(d, q)?;
        g.mat = Matrix::zero(d + 1, d + 1, &Self::like(q)?);
        let one = LaurentScalar::one(q)?;
        for i in 0..d {
            g.mat.set(i + 1, i, one.clone());
        }
        g.mat.set(0, d, LaurentScalar::term(FqElement::one(q)?, -1)?);
        Ok(g)
    }

    /// Diagonal of Teichmueller digits g^{e_j}.
    pub fn torus_digits(q: u32, digit_exp: &[i64]) -> Result<Self, OracleError> {
        let entries = digit_exp
            .iter()
            .map(|e| LaurentScalar::constant(FqElement::generator_pow(q, *e)?))
            .collect::<Result<Vec<_>, _>>()?;
        Self::diagonal(entries)
    }

    /// The diagonal with the uniformizer at slot w(0) and 1 elsewhere.
    pub fn torus_tw(q: u32, w: &Permutation) -> Result<Self, OracleError> {
        let d = w.d();
        let mut g = Self::identity(d, q)?;
        g.mat.set(w.apply(0), w.apply(0), LaurentScalar::uniformizer(q)?);
        Ok(g)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn matrix(&self) -> &Matrix<LaurentScalar> {
        &self.mat
    }

    pub fn at(&self, i: usize, j: usize) -> &LaurentScalar {
        self.mat.at(i, j)
    }

    pub fn mul(&self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.d, rhs.d, "size mismatch");
        assert_eq!(self.q, rhs.q, "field order mismatch");
        GroupElement { d: self.d, q: self.q, mat: self.mat.matmul(&rhs.mat) }
    }

    /// Entrywise agreement up to the precision cutoffs.
    pub fn agrees_with(&self, rhs: &GroupElement) -> bool {
        if self.d != rhs.d || self.q != rhs.q {
            return false;
        }
        (0..=self.d)
            .all(|i| (0..=self.d).all(|j| self.at(i, j).agrees_with(rhs.at(i, j))))
    }

    /// Determinant by expansion along the first column (sizes here are tiny).
    pub fn determinant(&self) -> LaurentScalar {
        fn det_rec(
            g: &Matrix<LaurentScalar>,
            rows: &[usize],
            cols: &[usize],
            zero: &LaurentScalar,
        ) -> LaurentScalar {
            if rows.len() == 1 {
                return g.at(rows[0], cols[0]).clone();
            }
            let mut acc = zero.clone();
            let sub_cols = &cols[1..];
            for (pos, r) in rows.iter().enumerate() {
                let entry = g.at(*r, cols[0]);
                if entry.is_zero_at_precision() && entry.precision().is_none() {
                    continue;
                }
                let rest: Vec<usize> =
                    rows.iter().enumerate().filter(|(p, _)| *p != pos).map(|(_, x)| *x).collect();
                let minor = det_rec(g, &rest, sub_cols, zero);
                let term = entry.mul(&minor);
                acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
        let n = self.d + 1;
        let idx: Vec<usize> = (0..n).collect();
        let zero = LaurentScalar::zero(self.q).expect("valid q");
        det_rec(&self.mat, &idx, &idx, &zero)
    }

    /// True when the determinant has a known leading term; an error when
    /// the determinant vanishes at precision without being exactly zero.
    pub fn is_invertible(&self) -> Result<bool, OracleError> {
        let det = self.determinant();
        if det.leading().is_some() {
            return Ok(true);
        }
        if det.is_exactly_zero() {
            return Ok(false);
        }
        Err(OracleError::Precision { context: "determinant vanishes at precision".to_string() })
    }

    /// All below-diagonal entries vanish up to their cutoffs.
    pub fn is_upper_triangular_at_precision(&self) -> bool {
        (1..=self.d).all(|i| (0..i).all(|j| self.at(i, j).is_zero_at_precision()))
    }

    /// Membership in the pro-p unit group of the chamber: integral entries,
    /// diagonal congruent to 1, below-diagonal entries of positive
    /// valuation.  Errs when an entry's cutoff is too coarse to certify.
    pub fn is_in_i0(&self) -> Result<bool, OracleError> {
        let one = LaurentScalar::one(self.q)?;
        for i in 0..=self.d {
            for j in 0..=self.d {
                let entry = self.at(i, j);
                let (probe, bound) = if i == j {
                    (entry.sub(&one), 1)
                } else if i > j {
                    (entry.clone(), 1)
                } else {
                    (entry.clone(), 0)
                };
                match probe.leading() {
                    Some((v, _)) => {
                        if v < bound {
                            return Ok(false);
                        }
                    }
                    None => {
                        if let Some(p) = probe.precision() {
                            if p < bound {
                                return Err(OracleError::Precision {
                                    context: format!(
                                        "entry ({i}, {j}) known only below t^{p}"
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

impl std::fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "GroupElement(d={}, q={}) [", self.d, self.q)?;
        for i in 0..=self.d {
            write!(f, "  [")?;
            for j in 0..=self.d {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Result of splitting x = p * w * i.
#[derive(Debug, Clone)]
pub struct IwasawaParts {
    pub p: GroupElement,
    pub w: Permutation,
    pub i: GroupElement,
}

/// Splits an invertible x into an upper-triangular factor, a permutation,
/// and a pro-p chamber unit: x = p * w * i, exact at the working precision.
///
/// The algorithm sweeps rows bottom-up.  In each row the pivot is the
/// leftmost entry of minimal valuation among still-unused columns; the rest
/// of the row is cleared by column operations from the right.  An operation
/// adding c times the pivot column to a column further right has val(c) >= 0
/// and to a column further left has val(c) >= 1 (the pivot is strictly
/// minimal to its left), so the accumulated factor stays in the unit group
/// and no column swaps are ever needed.  The pivot positions spell out w;
/// the remaining factor is upper triangular after unpermuting the columns.
pub fn iwasawa_decompose(
    x: &GroupElement,
    cfg: OracleConfig,
) -> Result<IwasawaParts, OracleError> {
    let d = x.d;
    let n = d + 1;
    let q = x.q;
    let mut y = x.mat.clone();
    let one = LaurentScalar::one(q)?;
    let mut i_acc: Matrix<LaurentScalar> = Matrix::identity(n, &one);
    let mut used = vec![false; n];
    let mut images = vec![0usize; n];

    for a in (0..n).rev() {
        // Pivot: leftmost minimal valuation among unused columns.
        let mut best: Option<(i64, usize)> = None;
        let mut saw_truncated = false;
        for b in 0..n {
            if used[b] {
                continue;
            }
            match y.at(a, b).leading() {
                Some((v, _)) => {
                    if best.map_or(true, |(bv, _)| v < bv) {
                        best = Some((v, b));
                    }
                }
                None => {
                    if y.at(a, b).precision().is_some() {
                        saw_truncated = true;
                    }
                }
            }
        }
        let (pv, pb) = best.ok_or_else(|| {
            if saw_truncated {
                OracleError::Precision { context: format!("row {a} vanishes at precision") }
            } else {
                OracleError::Singular { context: format!("row {a} is zero") }
            }
        })?;
        // A truncated entry with no known terms hides exponents >= its
        // cutoff; the cutoff must rule out beating the pivot (or tying it
        // from the left).
        for b in 0..n {
            if used[b] || b == pb {
                continue;
            }
            let e = y.at(a, b);
            if e.leading().is_none() {
                if let Some(p) = e.precision() {
                    let threshold = if b < pb { pv + 1 } else { pv };
                    if p < threshold {
                        return Err(OracleError::Precision {
                            context: format!(
                                "pivot in row {a} uncertain: column {b} known only below t^{p}"
                            ),
                        });
                    }
                }
            }
        }
        used[pb] = true;
        images[pb] = a;
        let pivot_inv = y.at(a, pb).invert(cfg.n)?;
        for k in 0..n {
            if used[k] || y.at(a, k).is_zero_at_precision() {
                continue;
            }
            let c = y.at(a, k).mul(&pivot_inv);
            debug_assert!(
                c.valuation().map_or(true, |v| if k < pb { v >= 1 } else { v >= 0 }),
                "column operation leaves the unit group"
            );
            // y := y * (id - c E_{pb,k}) subtracts c times column pb from
            // column k; the inverse elementary accumulates on i from the
            // left, adding c times row k to row pb.
            for r in 0..n {
                let updated = y.at(r, k).sub(&y.at(r, pb).mul(&c));
                y.set(r, k, updated);
            }
            for col in 0..n {
                let updated = i_acc.at(pb, col).add(&c.mul(i_acc.at(k, col)));
                i_acc.set(pb, col, updated);
            }
        }
    }

    let w = Permutation::from_images(images)?;
    let winv = w.inverse();
    let p = Matrix::from_fn(n, n, |r, c| y.at(r, winv.apply(c)).clone());
    Ok(IwasawaParts {
        p: GroupElement { d, q, mat: p },
        w,
        i: GroupElement { d, q, mat: i_acc },
    })
}

/// Evaluates the basis function f_w at x: zero unless x lies in the cell of
/// w, else the character value of the upper-triangular factor, read off the
/// diagonal through valuations and Teichmueller leading coefficients.
pub fn evaluate_f(
    c: &CharacterData,
    w: &Permutation,
    x: &GroupElement,
    cfg: OracleConfig,
) -> Result<Scalar, OracleError> {
    if c.d() != x.d || w.d() != x.d || c.q() != x.q {
        return Err(OracleError::BadInput(format!(
            "mismatched shapes: character d={} q={}, w on d={}, x on d={} q={}",
            c.d(),
            c.q(),
            w.d(),
            x.d,
            x.q
        )));
    }
    let parts = iwasawa_decompose(x, cfg)?;
    let params = c.params();
    if parts.w != *w {
        return Ok(Scalar::zero(params));
    }
    let mut zeta_exp: i64 = 0;
    let mut pi_exp: i64 = 0;
    for j in 0..=x.d {
        let (v, lead) = parts.p.at(j, j).leading().ok_or_else(|| OracleError::Precision {
            context: format!("diagonal entry {j} of the triangular factor has no known term"),
        })?;
        let dl = lead.dlog().expect("leading coefficients are nonzero") as i64;
        zeta_exp += c.theta_exp()[j] * dl + v * c.unit_exp_at_slot(j);
        pi_exp += v * c.pi_ord_at_slot(j);
    }
    Ok(Scalar::monomial(params, zeta_exp, pi_exp))
}

/// Applies a generator to f_w by literal coset sums: the image coefficient
/// at f_v is the sum of f_w over v times the right coset factors (q of them
/// for a reflection, one for each rotation and torus element).  Returns the
/// image coordinates indexed by lexicographic rank.
pub fn hecke_bruteforce(
    c: &CharacterData,
    generator: &HeckeGenerator,
    w: &Permutation,
    cfg: OracleConfig,
) -> Result<Vec<Scalar>, OracleError> {
    let d = c.d();
    let q = c.q();
    if w.d() != d {
        return Err(OracleError::BadInput(format!(
            "basis permutation on d={} against character d={d}",
            w.d()
        )));
    }
    let mut factors: Vec<GroupElement> = Vec::new();
    match generator {
        HeckeGenerator::S(i) => {
            if *i < 1 || *i > d {
                return Err(OracleError::BadInput(format!("generator s_{i} with d = {d}")));
            }
            let s = GroupElement::permutation(q, &Permutation::s(d, *i)?)?;
            let mut reps = vec![FqElement::zero(q)?];
            reps.extend(FqElement::units(q)?);
            for a in reps {
                let nu = GroupElement::nu_s(d, *i, &LaurentScalar::constant(a)?)?;
                factors.push(nu.mul(&s));
            }
        }
        HeckeGenerator::U => {
            factors.push(GroupElement::rotation_inverse(d, q)?);
        }
        HeckeGenerator::UInv => {
            factors.push(GroupElement::rotation(d, q)?);
        }
        HeckeGenerator::T(e) => {
            if e.len() != d + 1 {
                return Err(OracleError::BadInput(format!(
                    "torus digit vector of length {} with d = {d}",
                    e.len()
                )));
            }
            let neg: Vec<i64> = e.iter().map(|x| -x).collect();
            factors.push(GroupElement::torus_digits(q, &neg)?);
        }
    }
    let perms = Permutation::enumerate(d)?;
    let mut out = Vec::with_capacity(perms.len());
    for v in &perms {
        let vmat = GroupElement::permutation(q, v)?;
        let mut acc = Scalar::zero(c.params());
        for g in &factors {
            let value = evaluate_f(c, w, &vmat.mul(g), cfg)?;
            acc = &acc + &value;
        }
        out.push(acc);
    }
    Ok(out)
}

/// One failed column comparison: the generator, the basis element, and the
/// two renderings of the image column.
#[derive(Debug, Clone, Serialize)]
pub struct MismatchEntry {
    pub generator: String,
    pub w: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of comparing every generator column against the coset sums.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub matches: usize,
    pub mismatches: Vec<MismatchEntry>,
    pub precision: i64,
}

impl ComparisonReport {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// The generators compared by [`compare_closed_form`]: every reflection,
/// both rotations, and one torus element per digit slot (deduplicated, so
/// q = 2 contributes a single trivial torus element).
pub fn standard_generators(d: usize, q: u32) -> Vec<HeckeGenerator> {
    let mut gens: Vec<HeckeGenerator> = (1..=d).map(HeckeGenerator::S).collect();
    gens.push(HeckeGenerator::U);
    gens.push(HeckeGenerator::UInv);
    let order = (q as i64 - 1).max(1);
    for k in 0..=d {
        let mut e = vec![0i64; d + 1];
        e[k] = 1 % order;
        let t = HeckeGenerator::T(e);
        if !gens.contains(&t) {
            gens.push(t);
        }
    }
    gens
}

fn render_column(col: &[Scalar], perms: &[Permutation]) -> String {
    let parts: Vec<String> =
        col.iter().zip(perms).map(|(s, v)| format!("{v}: {s}")).collect();
    format!("[{}]", parts.join("; "))
}

fn compare_at(c: &CharacterData, cfg: OracleConfig) -> Result<ComparisonReport, OracleError> {
    let d = c.d();
    let q = c.q();
    let perms = Permutation::enumerate(d)?;
    let mut matches = 0usize;
    let mut mismatches = Vec::new();
    for gen in standard_generators(d, q) {
        let closed = operator_matrix(c, &gen)?;
        for w in &perms {
            let brute = hecke_bruteforce(c, &gen, w, cfg)?;
            let col = w.lex_rank();
            let expected: Vec<Scalar> =
                (0..perms.len()).map(|row| closed.at(row, col).clone()).collect();
            if expected == brute {
                matches += 1;
            } else {
                mismatches.push(MismatchEntry {
                    generator: gen.to_string(),
                    w: format!("{w}"),
                    expected: render_column(&expected, &perms),
                    got: render_column(&brute, &perms),
                });
            }
        }
    }
    Ok(ComparisonReport { matches, mismatches, precision: cfg.n })
}

/// Compares the coset sums against every closed-form generator matrix,
/// column by column, in exact scalar arithmetic.  Mismatches are report
/// content, not errors.  A precision failure retries once at doubled
/// working precision.
pub fn compare_closed_form(
    c: &CharacterData,
    cfg: OracleConfig,
) -> Result<ComparisonReport, OracleError> {
    match compare_at(c, cfg) {
        Err(OracleError::Precision { .. }) => compare_at(c, cfg.doubled()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u32, v: i64) -> FqElement {
        FqElement::from_int(q, v).unwrap()
    }

    fn constant(q: u32, v: i64) -> LaurentScalar {
        LaurentScalar::constant(fq(q, v)).unwrap()
    }

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn rotation_powers_and_torus_split() {
        for (d, q) in [(1usize, 2u32), (2, 3), (3, 5)] {
            let u = GroupElement::rotation(d, q).unwrap();
            let mut pow = GroupElement::identity(d, q).unwrap();
            for _ in 0..=d {
                pow = pow.mul(&u);
            }
            let t_id = GroupElement::diagonal(vec![
                LaurentScalar::uniformizer(q).unwrap();
                d + 1
            ])
            .unwrap();
            assert!(pow.agrees_with(&t_id), "u^(d+1) is the uniformizer times the identity");

            // ubar^{-1} u is the diagonal with the uniformizer at slot 0.
            let ubar_inv =
                GroupElement::permutation(q, &Permutation::ubar(d).inverse()).unwrap();
            let split = ubar_inv.mul(&u);
            let expected =
                GroupElement::torus_tw(q, &Permutation::identity(d)).unwrap();
            assert!(split.agrees_with(&expected));

            let uinv = GroupElement::rotation_inverse(d, q).unwrap();
            assert!(u.mul(&uinv).agrees_with(&GroupElement::identity(d, q).unwrap()));
        }
    }

    #[test]
    fn determinant_flags_singular_matrices() {
        let q = 3;
        let u = GroupElement::rotation(2, q).unwrap();
        assert!(u.is_invertible().unwrap());
        assert_eq!(u.determinant().valuation(), Some(1));

        let mut rows = Matrix::zero(2, 2, &LaurentScalar::zero(q).unwrap());
        rows.set(0, 0, constant(q, 1));
        rows.set(0, 1, constant(q, 2));
        rows.set(1, 0, constant(q, 2));
        rows.set(1, 1, constant(q, 1));
        // Rows are proportional in F_3: (1, 2) and (2, 1) = 2 * (1, 2).
        let g = GroupElement::from_matrix(rows).unwrap();
        assert!(!g.is_invertible().unwrap());
        assert!(matches!(
            iwasawa_decompose(&g, cfg()),
            Err(OracleError::Singular { .. })
        ));
    }

    #[test]
    fn decompose_fixes_permutation_matrices() {
        let q = 3;
        for d in [1usize, 2, 3] {
            for w in Permutation::enumerate(d).unwrap() {
                let x = GroupElement::permutation(q, &w).unwrap();
                let parts = iwasawa_decompose(&x, cfg()).unwrap();
                assert_eq!(parts.w, w);
                assert!(parts.p.agrees_with(&GroupElement::identity(d, q).unwrap()));
                assert!(parts.i.agrees_with(&GroupElement::identity(d, q).unwrap()));
            }
        }
    }

    #[test]
    fn decompose_keeps_chamber_units_in_the_identity_cell() {
        let q = 3;
        let d = 2;
        // A deliberately mixed element of the pro-p chamber group.
        let x = GroupElement::elementary(d, 2, 0, &LaurentScalar::uniformizer(q).unwrap())
            .unwrap()
            .mul(&GroupElement::nu_s(d, 1, &constant(q, 2)).unwrap())
            .mul(
                &GroupElement::diagonal(vec![
                    LaurentScalar::one(q).unwrap(),
                    LaurentScalar::one(q)
                        .unwrap()
                        .add(&LaurentScalar::uniformizer(q).unwrap()),
                    LaurentScalar::one(q).unwrap(),
                ])
                .unwrap(),
            );
        assert!(x.is_in_i0().unwrap());
        let parts = iwasawa_decompose(&x, cfg()).unwrap();
        assert!(parts.w.is_identity());
        assert!(parts.p.is_upper_triangular_at_precision());
        assert!(parts.i.is_in_i0().unwrap());
        let recomposed = parts
            .p
            .mul(&GroupElement::permutation(q, &parts.w).unwrap())
            .mul(&parts.i);
        assert!(recomposed.agrees_with(&x));
    }

    #[test]
    fn decompose_splits_reflected_unipotents_as_the_conjugation_identity_predicts() {
        // s nu(a) s for a unit a is lower unipotent; its cell is s itself
        // and the triangular factor is h_s(a^{-1}) nu_s(a) delta_s.
        let d = 1;
        for q in [3u32, 5] {
            for a in FqElement::units(q).unwrap() {
                let s_mat =
                    GroupElement::permutation(q, &Permutation::s(d, 1).unwrap()).unwrap();
                let a_series = LaurentScalar::constant(a).unwrap();
                let x = s_mat
                    .mul(&GroupElement::nu_s(d, 1, &a_series).unwrap())
                    .mul(&s_mat);
                let parts = iwasawa_decompose(&x, cfg()).unwrap();
                assert_eq!(parts.w, Permutation::s(d, 1).unwrap());
                let p_expected = GroupElement::h_s(d, 1, &a_series.invert(8).unwrap())
                    .unwrap()
                    .mul(&GroupElement::nu_s(d, 1, &a_series).unwrap())
                    .mul(&GroupElement::delta_s(d, q, 1).unwrap());
                assert!(parts.p.agrees_with(&p_expected));
                let i_expected =
                    GroupElement::nu_s(d, 1, &a_series.invert(8).unwrap()).unwrap();
                assert!(parts.i.agrees_with(&i_expected));
            }
        }
    }

    #[test]
    fn reflection_conjugation_identity_holds_at_every_embedding() {
        // s nu_s(a) s = h_s(a^{-1}) nu_s(a) delta_s s nu_s(a^{-1}) as exact
        // matrices, for every reflection and every unit a.
        for (d, q) in [(1usize, 2u32), (2, 3), (3, 4), (2, 5)] {
            for i in 1..=d {
                let s = GroupElement::permutation(q, &Permutation::s(d, i).unwrap()).unwrap();
                for a in FqElement::units(q).unwrap() {
                    let a_series = LaurentScalar::constant(a).unwrap();
                    let a_inv = a_series.invert(8).unwrap();
                    let lhs = s
                        .mul(&GroupElement::nu_s(d, i, &a_series).unwrap())
                        .mul(&s);
                    let rhs = GroupElement::h_s(d, i, &a_inv)
                        .unwrap()
                        .mul(&GroupElement::nu_s(d, i, &a_series).unwrap())
                        .mul(&GroupElement::delta_s(d, q, i).unwrap())
                        .mul(&s)
                        .mul(&GroupElement::nu_s(d, i, &a_inv).unwrap());
                    assert!(lhs.agrees_with(&rhs), "d={d} q={q} i={i} a={a}");
                }
            }
        }
    }

    #[test]
    fn ascent_conjugation_is_upper_unipotent() {
        // w nu_s(b) w^{-1} is the identity plus b at (w(i-1), w(i)); on an
        // ascent that spot is above the diagonal.
        let q = 3;
        for d in [1usize, 2, 3] {
            let samples = [
                constant(q, 1),
                constant(q, 2),
                LaurentScalar::uniformizer(q).unwrap(),
                LaurentScalar::one(q)
                    .unwrap()
                    .add(&LaurentScalar::uniformizer(q).unwrap()),
            ];
            for w in Permutation::enumerate(d).unwrap() {
                let wm = GroupElement::permutation(q, &w).unwrap();
                let wm_inv = GroupElement::permutation(q, &w.inverse()).unwrap();
                for i in 1..=d {
                    if !w.ascends_at(i) {
                        continue;
                    }
                    for b in &samples {
                        let conj =
                            wm.mul(&GroupElement::nu_s(d, i, b).unwrap()).mul(&wm_inv);
                        let expected = GroupElement::elementary(
                            d,
                            w.apply(i - 1),
                            w.apply(i),
                            b,
                        )
                        .unwrap();
                        assert!(w.apply(i - 1) < w.apply(i));
                        assert!(conj.agrees_with(&expected));
                    }
                }
            }
        }
    }

    #[test]
    fn reflected_products_land_outside_the_reference_cell() {
        for (d, q) in [(1usize, 2u32), (1, 3), (2, 2), (2, 3)] {
            let perms = Permutation::enumerate(d).unwrap();
            let mut reps = vec![FqElement::zero(q).unwrap()];
            reps.extend(FqElement::units(q).unwrap());
            for w in &perms {
                for i in 1..=d {
                    let ws = w.times_s(i).unwrap();
                    let s_mat =
                        GroupElement::permutation(q, &Permutation::s(d, i).unwrap()).unwrap();
                    if w.ascends_at(i) {
                        // On an ascent, a unit entry pushes ws nu(a) s out
                        // of the cell of w...
                        for a in FqElement::units(q).unwrap() {
                            let x = GroupElement::permutation(q, &ws)
                                .unwrap()
                                .mul(
                                    &GroupElement::nu_s(
                                        d,
                                        i,
                                        &LaurentScalar::constant(a).unwrap(),
                                    )
                                    .unwrap(),
                                )
                                .mul(&s_mat);
                            let parts = iwasawa_decompose(&x, cfg()).unwrap();
                            assert_ne!(&parts.w, w);
                        }
                        // ...and no v other than ws reaches that cell at all.
                        for v in &perms {
                            if v == &ws {
                                continue;
                            }
                            for a in &reps {
                                let x = GroupElement::permutation(q, v)
                                    .unwrap()
                                    .mul(
                                        &GroupElement::nu_s(
                                            d,
                                            i,
                                            &LaurentScalar::constant(*a).unwrap(),
                                        )
                                        .unwrap(),
                                    )
                                    .mul(&s_mat);
                                let parts = iwasawa_decompose(&x, cfg()).unwrap();
                                assert_ne!(&parts.w, w);
                            }
                        }
                    }
                    // Unconditionally, v nu(a) s stays outside the cell of w
                    // for v other than w and ws.
                    for v in &perms {
                        if v == w || v == &ws {
                            continue;
                        }
                        for a in &reps {
                            let x = GroupElement::permutation(q, v)
                                .unwrap()
                                .mul(
                                    &GroupElement::nu_s(
                                        d,
                                        i,
                                        &LaurentScalar::constant(*a).unwrap(),
                                    )
                                    .unwrap(),
                                )
                                .mul(&s_mat);
                            let parts = iwasawa_decompose(&x, cfg()).unwrap();
                            assert_ne!(&parts.w, w);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_function_examples() {
        let c = CharacterData::new(vec![0, 1, 2], vec![1, 0, -1], vec![0, 1, 0], 3, 1).unwrap();
        let d = c.d();
        let q = c.q();
        let perms = Permutation::enumerate(d).unwrap();
        for w in &perms {
            let wm = GroupElement::permutation(q, w).unwrap();
            for v in &perms {
                let val = evaluate_f(&c, w, &GroupElement::permutation(q, v).unwrap(), cfg())
                    .unwrap();
                let expected = if v == w {
                    Scalar::one(c.params())
                } else {
                    Scalar::zero(c.params())
                };
                assert_eq!(val, expected);
            }
            // Left translation by a uniformizer diagonal multiplies by the
            // character value on that diagonal.
            for v in &perms {
                let tv = GroupElement::torus_tw(q, v).unwrap();
                let val = evaluate_f(&c, w, &tv.mul(&wm), cfg()).unwrap();
                assert_eq!(val, c.scalar_of_tw(v));
            }
            // Same for a Teichmueller digit diagonal.
            let digits = vec![1i64, 0, 1];
            let tdig = GroupElement::torus_digits(q, &digits).unwrap();
            let val = evaluate_f(&c, w, &tdig.mul(&wm), cfg()).unwrap();
            let zeta_exp: i64 =
                digits.iter().zip(c.theta_exp()).map(|(e, a)| e * a).sum();
            assert_eq!(val, Scalar::zeta_pow(c.params(), zeta_exp));
        }
    }

    #[test]
    fn coset_sum_worked_examples() {
        // Ascent: the image of f_e under the reflection is f_{s_1}.
        let c = CharacterData::trivial(1, 3, 1).unwrap();
        let e = Permutation::identity(1);
        let s1 = Permutation::s(1, 1).unwrap();
        let out = hecke_bruteforce(&c, &HeckeGenerator::S(1), &e, cfg()).unwrap();
        assert_eq!(out[e.lex_rank()], Scalar::zero(c.params()));
        assert_eq!(out[s1.lex_rank()], Scalar::one(c.params()));

        // Descent with a trivial character: q at the target, kappa (q-1)
        // on the diagonal; kappa is plus one here.
        let out = hecke_bruteforce(&c, &HeckeGenerator::S(1), &s1, cfg()).unwrap();
        let q_scalar = Scalar::monomial(c.params(), 0, 1);
        assert_eq!(out[e.lex_rank()], q_scalar);
        let q_minus_one = &Scalar::monomial(c.params(), 0, 1) - &Scalar::one(c.params());
        assert_eq!(out[s1.lex_rank()], q_minus_one);

        // Torus element: diagonal action by the conjugated character value.
        let c = CharacterData::new(vec![0, 1], vec![0, 0], vec![0, 0], 3, 1).unwrap();
        let digits = vec![1i64, 0];
        let out = hecke_bruteforce(&c, &HeckeGenerator::T(digits.clone()), &s1, cfg()).unwrap();
        assert_eq!(out[e.lex_rank()], Scalar::zero(c.params()));
        let exp = c.theta_conjugated_inverse_exp(&s1, &digits);
        assert_eq!(out[s1.lex_rank()], Scalar::zeta_pow(c.params(), exp));
    }

    #[test]
    fn coset_sums_match_closed_form_operators() {
        let characters = vec![
            CharacterData::trivial(1, 2, 1).unwrap(),
            CharacterData::new(vec![0, 1], vec![1, -1], vec![0, 1], 3, 1).unwrap(),
            CharacterData::trivial(2, 2, 1).unwrap(),
            CharacterData::new(vec![0, 1, 2], vec![1, 0, -1], vec![0, 1, 0], 3, 1).unwrap(),
            CharacterData::new(vec![0, 0, 1], vec![2, -1, -1], vec![1, 0, 0], 3, 2).unwrap(),
        ];
        for c in &characters {
            let report = compare_closed_form(c, cfg()).unwrap();
            assert!(
                report.all_match(),
                "d={} q={} theta={:?}: {:?}",
                c.d(),
                c.q(),
                c.theta_exp(),
                report.mismatches
            );
            let expected_pairs = standard_generators(c.d(), c.q()).len()
                * Permutation::enumerate(c.d()).unwrap().len();
            assert_eq!(report.matches, expected_pairs);
        }
        // The q = 2 generator list collapses the torus to one element:
        // s_1, both rotations, one torus element.
        assert_eq!(standard_generators(1, 2).len(), 4);
        assert_eq!(standard_generators(1, 3).len(), 5);
    }

    #[test]
    fn comparison_report_serializes_with_schema_keys() {
        let c = CharacterData::trivial(1, 2, 1).unwrap();
        let report = compare_closed_form(&c, cfg()).unwrap();
        let json = report.to_json();
        assert!(json.get("matches").is_some());
        assert!(json.get("mismatches").is_some());
        assert_eq!(json.get("precision").and_then(|v| v.as_i64()), Some(8));
    }

    #[test]
    fn doubling_the_precision_changes_nothing() {
        let c = CharacterData::new(vec![0, 1, 1], vec![1, 1, -2], vec![0, 0, 1], 3, 2).unwrap();
        let at8 = compare_closed_form(&c, OracleConfig::new(8).unwrap()).unwrap();
        let at16 = compare_closed_form(&c, OracleConfig::new(16).unwrap()).unwrap();
        assert!(at8.all_match());
        assert!(at16.all_match());
        assert_eq!(at8.matches, at16.matches);
    }

    fn random_series(rng: &mut ChaCha8Rng, q: u32) -> LaurentScalar {
        let units = FqElement::units(q).unwrap();
        let c0 = *units.choose(rng).unwrap();
        match rng.gen_range(0..4) {
            0 => LaurentScalar::constant(c0).unwrap(),
            1 => LaurentScalar::term(c0, 1).unwrap(),
            2 => LaurentScalar::constant(c0)
                .unwrap()
                .add(&LaurentScalar::term(*units.choose(rng).unwrap(), 1).unwrap()),
            _ => LaurentScalar::term(c0, rng.gen_range(-1..=2)).unwrap(),
        }
    }

    fn random_group_element(rng: &mut ChaCha8Rng, d: usize, q: u32) -> GroupElement {
        let mut x = GroupElement::identity(d, q).unwrap();
        let len = rng.gen_range(3..=7);
        for _ in 0..len {
            let factor = match rng.gen_range(0..6) {
                0 => {
                    let mut images: Vec<usize> = (0..=d).collect();
                    images.shuffle(rng);
                    GroupElement::permutation(
                        q,
                        &Permutation::from_images(images).unwrap(),
                    )
                    .unwrap()
                }
                1 => {
                    let i = rng.gen_range(1..=d);
                    GroupElement::nu_s(d, i, &random_series(rng, q)).unwrap()
                }
                2 => {
                    let i = rng.gen_range(1..=d);
                    let units = FqElement::units(q).unwrap();
                    // Below-diagonal entry of valuation exactly 1.
                    let c = LaurentScalar::term(*units.choose(rng).unwrap(), 1).unwrap();
                    GroupElement::elementary(d, i, rng.gen_range(0..i), &c).unwrap()
                }
                3 => {
                    let units = FqElement::units(q).unwrap();
                    let entries = (0..=d)
                        .map(|_| {
                            let u = *units.choose(rng).unwrap();
                            let base = LaurentScalar::constant(u).unwrap();
                            if rng.gen_bool(0.5) {
                                base.add(
                                    &LaurentScalar::term(
                                        *units.choose(rng).unwrap(),
                                        1,
                                    )
                                    .unwrap(),
                                )
                            } else {
                                base
                            }
                        })
                        .collect();
                    GroupElement::diagonal(entries).unwrap()
                }
                4 => GroupElement::rotation(d, q).unwrap(),
                _ => GroupElement::rotation_inverse(d, q).unwrap(),
            };
            x = x.mul(&factor);
        }
        x
    }

    #[test]
    fn round_trip_on_seeded_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let cases: [(usize, u32); 2] = [(1, 2), (2, 3)];
        for _ in 0..500 {
            for (d, q) in cases {
                let x = random_group_element(&mut rng, d, q);
                let parts = iwasawa_decompose(&x, cfg()).unwrap();
                assert!(parts.p.is_upper_triangular_at_precision());
                assert!(parts.i.is_in_i0().unwrap());
                let recomposed = parts
                    .p
                    .mul(&GroupElement::permutation(q, &parts.w).unwrap())
                    .mul(&parts.i);
                assert!(recomposed.agrees_with(&x));
            }
        }
    }

    #[test]
    fn decomposition_cell_is_stable_under_precision_doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = random_group_element(&mut rng, 2, 3);
            let at8 = iwasawa_decompose(&x, OracleConfig::new(8).unwrap()).unwrap();
            let at16 = iwasawa_decompose(&x, OracleConfig::new(16).unwrap()).unwrap();
            assert_eq!(at8.w, at16.w);
        }
    }
}
