//! The acceptance battery: ten end-to-end checks covering the whole
//! pipeline at desk scale, from weight enumeration through reduction and
//! realization.  Each check sweeps an exhaustive grid (no sampling unless
//! stated), returns a one-line verdict with counts, and is cheap enough to
//! run on every change.  The `acceptance` integration test and the `suite`
//! subcommand of the command-line tool both run exactly this battery.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coxeter::Permutation;
use crate::nabla::{
    build_nabla, check_equinab, check_integration, EquinabMode, NablaFunction, SigmaFunction,
};
use crate::oracle::{compare_closed_form, OracleConfig};
use crate::psmod::{
    check_relations, dual_character, is_lattice_stable, unitarity_criterion, CharacterData,
    HeckeModule, PsmodError,
};
use crate::scalars::FqElement;
use crate::weights::{enumerate_balanced, is_balanced, reverse_weight};
use crate::wtype::{
    reduce_lattice, reduced_words_capped, search_partial, silvester_realize, validate_action,
};

/// Number of checks in the battery.
pub const CRITERION_COUNT: usize = 10;

/// Wall-clock budget per check, in milliseconds.  The grids are sized so
/// that actual runtimes stay far below these bounds on ordinary hardware.
pub const BUDGETS_MS: [u128; CRITERION_COUNT] =
    [10_000, 5_000, 30_000, 60_000, 300_000, 120_000, 60_000, 30_000, 60_000, 120_000];

/// Outcome of one check: its verdict, a counting summary or a witness of
/// the failure, and the measured runtime.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CriterionResult {
    /// The canonical one-line report.
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} ({}): {} in {} ms ({})",
            self.index,
            self.name,
            if self.passed { "pass" } else { "FAIL" },
            self.millis,
            self.detail
        )
    }
}

/// Short behavior-describing names, indexed 1 through 10.
pub fn criterion_name(index: usize) -> &'static str {
    match index {
        1 => "balanced-weight reduction",
        2 => "reversal symmetry",
        3 => "weight integration",
        4 => "stability equivalence",
        5 => "matrix-model oracle agreement",
        6 => "generator relations",
        7 => "unitarity versus balance",
        8 => "duality invariance",
        9 => "reduction path agreement",
        10 => "realization round trip",
        _ => "unknown",
    }
}

/// Runs one check by index (1 through 10) and times it.  An out-of-range
/// index yields a failed result rather than a panic so that callers can
/// surface the mistake uniformly.
pub fn run_criterion(index: usize) -> CriterionResult {
    let start = Instant::now();
    let outcome = match index {
        1 => reduction_stays_balanced(),
        2 => reversal_preserves_balance(),
        3 => built_functions_integrate(),
        4 => stability_routes_agree(),
        5 => oracle_matches_closed_form(),
        6 => relations_hold_in_both_rings(),
        7 => criterion_matches_balance(),
        8 => duality_fixes_criterion(),
        9 => reduction_paths_coincide(),
        10 => realization_round_trips(),
        _ => Err(format!("no criterion with index {index}; valid indices are 1 through 10")),
    };
    let millis = start.elapsed().as_millis();
    let (passed, detail) = match outcome {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    CriterionResult { index, name: criterion_name(index), passed, detail, millis }
}

/// Runs the whole battery in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERION_COUNT).map(run_criterion).collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// 1. Reducing any balanced weight yields a balanced weight one degree
/// down whose coordinates sit within [0, r] of the originals.
fn reduction_stays_balanced() -> Result<String, String> {
    let mut checked = 0usize;
    for d in 1..=3usize {
        for r in 1..=2i64 {
            for w in enumerate_balanced(d, r).map_err(err)? {
                // The return type revalidates balance; length and the
                // coordinate bounds are checked here.
                let m = w.reduce_weight().map_err(err)?;
                if m.d() + 2 != d + 1 {
                    return Err(format!(
                        "reduction of {:?} has {} entries, expected {d}",
                        w.entries(),
                        m.d() + 1
                    ));
                }
                for i in 1..=d {
                    let diff = w.entry(i) - m.entry(i - 1);
                    if diff < 0 || diff > r {
                        return Err(format!(
                            "coordinate bound fails at index {i} for {:?} -> {:?} (r={r}): offset {diff}",
                            w.entries(),
                            m.entries()
                        ));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} reductions checked for d <= 3, r <= 2"))
}

/// 2. Reversal preserves balance and non-balance alike, on the exhaustive
/// enumeration and on a thousand seeded non-balanced probes.
fn reversal_preserves_balance() -> Result<String, String> {
    let mut balanced = 0usize;
    for d in 1..=3usize {
        for r in 1..=2i64 {
            for w in enumerate_balanced(d, r).map_err(err)? {
                if is_balanced(&reverse_weight(w.entries()), r).is_err() {
                    return Err(format!(
                        "reversal of balanced {:?} (r={r}) is not balanced",
                        w.entries()
                    ));
                }
                balanced += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xBA1A);
    let mut probes = 0usize;
    while probes < 1000 {
        let d = rng.gen_range(1..=3usize);
        let r = rng.gen_range(1..=2i64);
        let bound = 3 * r;
        let mut n: Vec<i64> = (0..d).map(|_| rng.gen_range(-bound..=bound)).collect();
        n.push(-n.iter().sum::<i64>());
        if is_balanced(&n, r).is_ok() {
            continue;
        }
        if is_balanced(&reverse_weight(&n), r).is_ok() {
            return Err(format!("reversal of non-balanced {n:?} (r={r}) came out balanced"));
        }
        probes += 1;
    }
    Ok(format!("{balanced} balanced weights and {probes} non-balanced probes agree under reversal"))
}

/// 3. The recursive construction integrates every balanced weight it is
/// given, over the full enumeration.
fn built_functions_integrate() -> Result<String, String> {
    let mut checked = 0usize;
    for d in 1..=3usize {
        for r in 1..=2i64 {
            for w in enumerate_balanced(d, r).map_err(err)? {
                let nabla = build_nabla(&w).map_err(err)?;
                check_integration(&nabla, w.entries(), r)
                    .map_err(|e| format!("{:?} (r={r}): {e}", w.entries()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} constructed functions integrate their weights"))
}

/// The three stability routes: the operator-level lattice check, the full
/// combinatorial check, and its last-reflection restriction.
fn three_way(c: &CharacterData, nabla: &NablaFunction) -> Result<(bool, bool, bool), String> {
    let lattice = match is_lattice_stable(c, nabla) {
        Ok(()) => true,
        Err(PsmodError::Unstable(_)) => false,
        Err(other) => return Err(other.to_string()),
    };
    let full = check_equinab(nabla, c, EquinabMode::Full).is_ok();
    let sd = check_equinab(nabla, c, EquinabMode::SdOnly).is_ok();
    Ok((lattice, full, sd))
}

/// 4. The three stability routes agree on pipeline pairs and on every bent
/// variant; the bent variants are all rejected.  Single-point changes break
/// a rotation increment; whole-orbit shifts keep every rotation increment
/// and break only an ascent window, so both failure modes are exercised.
fn stability_routes_agree() -> Result<String, String> {
    let mut pairs = 0usize;
    let mut rejected = 0usize;
    for q in [2u32, 3] {
        for d in 1..=2usize {
            let perms = Permutation::enumerate(d).map_err(err)?;
            let ubar = Permutation::ubar(d);
            let mut orbits: Vec<Vec<Permutation>> = Vec::new();
            let mut seen = vec![false; perms.len()];
            for w in &perms {
                if seen[w.lex_rank()] {
                    continue;
                }
                let mut orbit = Vec::new();
                let mut cur = w.clone();
                while !seen[cur.lex_rank()] {
                    seen[cur.lex_rank()] = true;
                    orbit.push(cur.clone());
                    cur = cur.compose(&ubar).map_err(err)?;
                }
                orbits.push(orbit);
            }
            for r in 1..=2i64 {
                for weight in enumerate_balanced(d, r).map_err(err)? {
                    let c = CharacterData::from_weight(&weight, q).map_err(err)?;
                    let nabla = build_nabla(&weight).map_err(err)?;
                    let verdict = three_way(&c, &nabla)?;
                    if verdict != (true, true, true) {
                        return Err(format!(
                            "pipeline pair q={q} {:?} (r={r}) not unanimously stable: {verdict:?}",
                            weight.entries()
                        ));
                    }
                    pairs += 1;
                    for w0 in &perms {
                        for delta in [1i64, -1] {
                            let bent = nabla.with_value(w0, nabla.value(w0) + delta);
                            let verdict = three_way(&c, &bent)?;
                            if verdict != (false, false, false) {
                                return Err(format!(
                                    "single-point change at {w0} (delta {delta}) not unanimously rejected for q={q} {:?}: {verdict:?}",
                                    weight.entries()
                                ));
                            }
                            pairs += 1;
                            rejected += 1;
                        }
                    }
                    // For d >= 2 the last reflection always leaves a
                    // rotation orbit, so an oversized shift of one orbit
                    // must trip a window while every rotation increment
                    // still matches.
                    if d >= 2 {
                        for orbit in &orbits {
                            let mut bent = nabla.clone();
                            for w0 in orbit {
                                bent = bent.with_value(w0, nabla.value(w0) + r + 1);
                            }
                            let verdict = three_way(&c, &bent)?;
                            if verdict != (false, false, false) {
                                return Err(format!(
                                    "orbit shift not unanimously rejected for q={q} {:?} (r={r}): {verdict:?}",
                                    weight.entries()
                                ));
                            }
                            pairs += 1;
                            rejected += 1;
                        }
                    }
                }
            }
        }
    }
    if pairs < 200 {
        return Err(format!("only {pairs} pairs exercised, need at least 200"));
    }
    Ok(format!("{pairs} pairs agree across all three routes ({rejected} bent variants rejected)"))
}

/// Character grid shared by the oracle and relation checks: at least four
/// per (d, q), covering trivial and patterned unit parts together with zero
/// and nonzero orders at both levels r = 1, 2.
fn oracle_characters(d: usize, q: u32) -> Result<Vec<CharacterData>, String> {
    let n = d + 1;
    let zeros = vec![0i64; n];
    let mut split = vec![0i64; n];
    split[0] = 1;
    split[d] = -1;
    let mut steep = vec![0i64; n];
    steep[0] = 2;
    steep[d] = -1;
    let mut list = vec![
        CharacterData::trivial(d, q, 1).map_err(err)?,
        CharacterData::new(zeros.clone(), split.clone(), zeros.clone(), q, 1).map_err(err)?,
        CharacterData::new(zeros.clone(), steep, zeros.clone(), q, 2).map_err(err)?,
    ];
    if q > 2 {
        let theta: Vec<i64> = (0..n as i64).collect();
        let mut units = zeros.clone();
        units[n - 1] = 1;
        list.push(CharacterData::new(theta.clone(), zeros.clone(), zeros.clone(), q, 1).map_err(err)?);
        list.push(CharacterData::new(theta, split, units, q, 2).map_err(err)?);
    } else {
        // q = 2 leaves no room in the unit parts; vary orders and level.
        list.push(CharacterData::trivial(d, q, 2).map_err(err)?);
        let mut lopsided = vec![0i64; n];
        lopsided[0] = -2;
        lopsided[d] = 1;
        list.push(CharacterData::new(zeros, lopsided, vec![0; n], q, 1).map_err(err)?);
    }
    Ok(list)
}

/// 5. Every closed-form operator column equals the coset sum computed in
/// the explicit matrix model, at the base cutoff and at twice the base
/// cutoff, with identical column counts.
fn oracle_matches_closed_form() -> Result<String, String> {
    let mut columns = 0usize;
    let mut characters = 0usize;
    for d in 1..=2usize {
        for q in [2u32, 3] {
            for c in oracle_characters(d, q)? {
                let base = compare_closed_form(&c, OracleConfig::new(8).map_err(err)?)
                    .map_err(err)?;
                let fine = compare_closed_form(&c, OracleConfig::new(16).map_err(err)?)
                    .map_err(err)?;
                for (label, report) in [("base", &base), ("fine", &fine)] {
                    if !report.all_match() {
                        let m = &report.mismatches[0];
                        return Err(format!(
                            "{label} cutoff, d={d} q={q}: {} at {} expected {} got {}",
                            m.generator, m.w, m.expected, m.got
                        ));
                    }
                }
                if base.matches != fine.matches {
                    return Err(format!(
                        "d={d} q={q}: column counts differ between cutoffs ({} vs {})",
                        base.matches, fine.matches
                    ));
                }
                columns += base.matches;
                characters += 1;
            }
        }
    }
    Ok(format!("{columns} operator columns over {characters} characters match the matrix model at both cutoffs"))
}

/// Every pipeline pair over the full grid d <= 3, r <= 2, q in {2, 3}.
/// All of them are stable by construction.
fn stable_pipeline_pairs() -> Result<Vec<(CharacterData, NablaFunction)>, String> {
    let mut out = Vec::new();
    for q in [2u32, 3] {
        for d in 1..=3usize {
            for r in 1..=2i64 {
                for weight in enumerate_balanced(d, r).map_err(err)? {
                    let c = CharacterData::from_weight(&weight, q).map_err(err)?;
                    let nabla = build_nabla(&weight).map_err(err)?;
                    out.push((c, nabla));
                }
            }
        }
    }
    Ok(out)
}

/// 6. The defining relations hold exactly for the operators on the full
/// basis, and again over the residue field for every reduced module the
/// pipeline produces.
fn relations_hold_in_both_rings() -> Result<String, String> {
    let mut exact = 0usize;
    for d in 1..=3usize {
        for q in [2u32, 3] {
            for c in oracle_characters(d, q)? {
                let module = HeckeModule::in_f_basis(&c).map_err(err)?;
                let report = check_relations(&module).map_err(err)?;
                if !report.all_passed() {
                    let names: Vec<&str> =
                        report.failures().iter().map(|c| c.name.as_str()).collect();
                    return Err(format!("exact relations fail for d={d} q={q}: {names:?}"));
                }
                exact += report.checks.len();
            }
        }
    }
    let mut residue = 0usize;
    for (c, nabla) in stable_pipeline_pairs()? {
        let module = reduce_lattice(&c, &nabla).map_err(err)?;
        let report = validate_action(&module);
        if !report.all_passed() {
            let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
            return Err(format!(
                "residue relations fail for d={} q={}: {names:?}",
                module.d(),
                module.q()
            ));
        }
        residue += report.checks.len();
    }
    Ok(format!("{exact} exact and {residue} residue-field relation checks passed"))
}

/// All order tuples with entries in [-bound, bound] summing to zero.
fn sum_zero_tuples(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let span = (2 * bound + 1) as usize;
    let count = span.pow((len - 1) as u32);
    let mut out = Vec::new();
    for code in 0..count {
        let mut c = code;
        let mut v = Vec::with_capacity(len);
        for _ in 0..len - 1 {
            v.push((c % span) as i64 - bound);
            c /= span;
        }
        let last = -v.iter().sum::<i64>();
        if last.abs() > bound {
            continue;
        }
        v.push(last);
        out.push(v);
    }
    out
}

/// 7. The subset-sum criterion on the orders agrees with balance of the
/// associated weight, exhaustively over all order tuples in [-2, 2]
/// summing to zero, for d <= 2 and r <= 2.
fn criterion_matches_balance() -> Result<String, String> {
    let mut agreed = 0usize;
    for d in 1..=2usize {
        for r in 1..=2i64 {
            for pi in sum_zero_tuples(d + 1, 2) {
                let c = CharacterData::new(vec![0; d + 1], pi.clone(), vec![0; d + 1], 3, r)
                    .map_err(err)?;
                let via_orders = unitarity_criterion(&c).is_ok();
                let via_weight = is_balanced(&c.weight(), r).is_ok();
                if via_orders != via_weight {
                    return Err(format!(
                        "d={d} r={r} orders {pi:?}: criterion says {via_orders}, weight balance says {via_weight}"
                    ));
                }
                agreed += 1;
            }
        }
    }
    Ok(format!("{agreed} order tuples agree between the two routes"))
}

/// 8. The criterion verdict is invariant under duality, and the dual of
/// the dual is the original character, on the same grid as check 7 plus a
/// handful of characters with nontrivial unit parts.
fn duality_fixes_criterion() -> Result<String, String> {
    let mut checked = 0usize;
    let mut grid: Vec<CharacterData> = Vec::new();
    for d in 1..=2usize {
        for r in 1..=2i64 {
            for pi in sum_zero_tuples(d + 1, 2) {
                grid.push(
                    CharacterData::new(vec![0; d + 1], pi, vec![0; d + 1], 3, r).map_err(err)?,
                );
            }
            let n = d + 1;
            let theta: Vec<i64> = (0..n as i64).collect();
            let mut units = vec![0i64; n];
            units[0] = 1;
            let mut split = vec![0i64; n];
            split[0] = 1;
            split[d] = -1;
            grid.push(CharacterData::new(theta, split, units, 5, r).map_err(err)?);
        }
    }
    for c in &grid {
        let dual = dual_character(c);
        if unitarity_criterion(c).is_ok() != unitarity_criterion(&dual).is_ok() {
            return Err(format!("duality changes the verdict for {c:?}"));
        }
        if dual_character(&dual) != *c {
            return Err(format!("double dual differs from the original for {c:?}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} characters keep their verdict under duality; double duality is the identity"))
}

/// 9. The reduction succeeds on every stable pipeline pair.  Success is
/// the assertion: the reduction runs both paths internally and fails on
/// any entry where they disagree.
fn reduction_paths_coincide() -> Result<String, String> {
    let mut reduced = 0usize;
    for (c, nabla) in stable_pipeline_pairs()? {
        reduce_lattice(&c, &nabla)
            .map_err(|e| format!("d={} q={}: {e}", c.d(), c.q()))?;
        reduced += 1;
    }
    Ok(format!("{reduced} stable pairs reduce identically along both paths"))
}

/// 10. For d = 2 every one of the 27 sign maps admits an increment
/// function; realization from (signs, increments, units) round-trips
/// through reduction to the directly built module; and the pair sums are
/// word-independent on at least two expressions per group element.
fn realization_round_trips() -> Result<String, String> {
    let d = 2usize;
    let q = 5u32;
    let r = 2i64;
    let perms = Permutation::enumerate(d).map_err(err)?;
    let eps = vec![FqElement::one(q).map_err(err)?; perms.len()];
    let thetas: Vec<Vec<i64>> = vec![vec![0, 0, 0], vec![0, 1, 2]];
    let sigmas = SigmaFunction::enumerate_all(d).map_err(err)?;
    if sigmas.len() != 27 {
        return Err(format!("expected 27 sign maps, enumerated {}", sigmas.len()));
    }
    let mut realized = 0usize;
    let mut word_sums = 0usize;
    for sigma in &sigmas {
        let partial = search_partial(sigma, r, d)
            .map_err(err)?
            .ok_or_else(|| format!("no increment function found for {sigma:?}"))?;
        for theta in &thetas {
            // Realization verifies internally that reducing the realized
            // pair reproduces the directly built module entry by entry.
            silvester_realize(theta, sigma, &eps, &partial)
                .map_err(|e| format!("theta {theta:?}, {sigma:?}: {e}"))?;
            realized += 1;
        }
        for w in &perms {
            for v in &perms {
                let reference = partial.pair_value(w, v).map_err(err)?;
                let mut words = reduced_words_capped(v, 4);
                if words.len() < 2 {
                    // Unique reduced word: a cancelling pair gives a second
                    // expression of the same element.
                    let mut padded = words[0].clone();
                    padded.extend([1, 1]);
                    words.push(padded);
                }
                for word in &words {
                    let via = partial.pair_value_via_word(w, word).map_err(err)?;
                    if via != reference {
                        return Err(format!(
                            "word {word:?} for {v} at {w} gives {via}, expected {reference}"
                        ));
                    }
                    word_sums += 1;
                }
            }
        }
    }
    Ok(format!("{realized} realizations round-tripped; {word_sums} word sums agree"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_cover_all_indices() {
        for index in 1..=CRITERION_COUNT {
            assert_ne!(criterion_name(index), "unknown");
        }
        assert_eq!(criterion_name(0), "unknown");
        assert_eq!(criterion_name(11), "unknown");
    }

    #[test]
    fn out_of_range_index_fails_cleanly() {
        let res = run_criterion(0);
        assert!(!res.passed);
        assert!(res.detail.contains("valid indices"));
    }

    #[test]
    fn results_serialize_with_schema_keys() {
        let res = run_criterion(7);
        assert!(res.passed, "{}", res.detail);
        let json = serde_json::to_value(&res).unwrap();
        for key in ["index", "name", "passed", "detail", "millis"] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }

    #[test]
    fn sum_zero_tuples_are_exhaustive_and_sum_to_zero() {
        let tuples = sum_zero_tuples(3, 2);
        assert_eq!(tuples.len(), 19);
        assert!(tuples.iter().all(|t| t.iter().sum::<i64>() == 0));
        assert!(tuples.iter().all(|t| t.iter().all(|x| x.abs() <= 2)));
    }
}
