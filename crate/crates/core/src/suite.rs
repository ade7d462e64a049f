//! Acceptance criteria as runnable checks.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde::Serialize;

use crate::analysis::edit::{splice, BlockContext};
use crate::analysis::{condensation_at, self_additive_at};
use crate::categoricity::{count_mn, enumerate_mn, syntactic_rank};
use crate::census::{full_rationals_model, generate_models, invariant, verify_family, Completion, ExampleFamily};
use crate::classify::{classify, Budgets, Verdict};
use crate::codec::{
    atomic_types, binary_structures_up_to_iso, next_permutation, type_indexing, verify_reduction, Mixing, TruncParams,
};
use crate::engine::{ef_oracle, splits, Engine, FiniteOrder};
use crate::error::Result;
use crate::parse::parse;
use crate::term::{ColorSet, Term};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{}]: {verdict} ({}; {:.1}s)", self.id, self.name, self.detail, self.seconds)
    }
}

pub const CRITERIA: [(usize, &str); 10] = [
    (1, "oracle equivalence"),
    (2, "chain law"),
    (3, "self-additivity facts"),
    (4, "condensation recovery"),
    (5, "M_n counting"),
    (6, "classification regression"),
    (7, "census Tn"),
    (8, "census cut families"),
    (9, "structure codec"),
    (10, "algebraic laws"),
];

/// Runs one criterion. Errors inside a check count as failures.
pub fn run_criterion(engine: &Engine, id: usize) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let outcome = match id {
        1 => oracle_equivalence(engine),
        2 => chain_law(engine),
        3 => self_additivity(engine),
        4 => condensation_recovery(engine),
        5 => mn_counting(),
        6 => classification_regression(engine),
        7 => census_tn(engine),
        8 => census_cuts(engine),
        9 => structure_codec(engine),
        10 => algebraic_laws(engine, LAW_CASES),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name, pass, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(engine: &Engine) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(engine, id)).collect()
}

type Outcome = Result<(bool, String)>;

/// Every order of size at most `max` whose points carry exactly one of
/// the colors `a`, `b`.
pub fn two_colored_orders(max: usize) -> Vec<FiniteOrder> {
    let colors = [ColorSet::from_names(["a"]), ColorSet::from_names(["b"])];
    let mut out = Vec::new();
    for size in 0..=max {
        for mask in 0u32..1 << size {
            out.push(FiniteOrder::new((0..size).map(|i| colors[(mask >> i & 1) as usize].clone()).collect()));
        }
    }
    out
}

pub const ORACLE_SIZE: usize = 6;
pub const ORACLE_RANK: usize = 3;

fn oracle_equivalence(engine: &Engine) -> Outcome {
    let orders = two_colored_orders(ORACLE_SIZE);
    let terms: Vec<Term> = orders.iter().map(FiniteOrder::to_term).collect();
    let mut pairs = 0usize;
    let mut disagreements = 0usize;
    for i in 0..orders.len() {
        for j in i..orders.len() {
            for n in 0..=ORACLE_RANK {
                pairs += 1;
                if engine.ef_equiv(&terms[i], &terms[j], n)? != ef_oracle(&orders[i], &orders[j], n)? {
                    disagreements += 1;
                }
            }
        }
    }
    Ok((
        disagreements == 0,
        format!("{} orders, {pairs} pair-rank checks, {disagreements} disagreements", orders.len()),
    ))
}

fn chain_law(engine: &Engine) -> Outcome {
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for n in 0..=4usize {
        let bound = (1usize << n) - 1;
        for a in 0..=20usize {
            for b in 0..=20usize {
                checks += 1;
                let expected = a == b || (a >= bound && b >= bound);
                if engine.ef_equiv(&Term::fin(a), &Term::fin(b), n)? != expected {
                    mismatches.push((n, a, b));
                }
            }
        }
    }
    Ok((mismatches.is_empty(), format!("{checks} checks, mismatches {mismatches:?}")))
}

fn self_additivity(engine: &Engine) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["zeta", "eta"] {
        let t = parse(name)?;
        let all = (1..=6).map(|n| self_additive_at(engine, &t, n)).collect::<Result<Vec<_>>>()?;
        ok &= all.iter().all(|&b| b);
        notes.push(format!("{name} {all:?}"));
    }
    for text in ["omega", "z(pt[]) + pt[] + z(pt[])"] {
        let t = parse(text)?;
        let first_false = (1..=2).map(|n| self_additive_at(engine, &t, n)).collect::<Result<Vec<_>>>()?;
        let fails = first_false.iter().position(|&b| !b).map(|i| i + 1);
        ok &= fails.is_some();
        notes.push(format!("{text} fails at {fails:?}"));
    }
    Ok((ok, notes.join("; ")))
}

/// Least rank in `2..=6` at which the condensation of `t` is stable.
fn stable_condensation(engine: &Engine, t: &Term) -> Result<Option<(usize, usize)>> {
    for n in 2..=6 {
        if !self_additive_at(engine, t, n)? {
            return Ok(None);
        }
        let c = condensation_at(engine, t, n)?;
        if c.stable {
            return Ok(Some((n, c.class_count())));
        }
    }
    Ok(None)
}

fn condensation_recovery(engine: &Engine) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for k in 1..=5 {
        let t = Term::zeta().repeat(k);
        match stable_condensation(engine, &t)? {
            Some((n, classes)) => {
                ok &= classes == k;
                notes.push(format!("k={k}: {classes} classes at rank {n}"));
            }
            None => {
                ok = false;
                notes.push(format!("k={k}: no stable rank"));
            }
        }
    }
    Ok((ok, notes.join(", ")))
}

/// Closed form `count(0) = 2^k`, `count(n+1) = m + m² + 2^m − 1`.
fn mn_closed_form(k: usize, n: usize) -> u128 {
    let mut m = 1u128 << k;
    for _ in 0..n {
        m = m + m * m + ((1u128 << m) - 1);
    }
    m
}

fn mn_counting() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut worst = 0usize;
    for k in 0..=1 {
        for n in 0..=2 {
            let members = enumerate_mn(k, n)?;
            let expected = mn_closed_form(k, n);
            ok &= members.len() as u128 == expected && count_mn(k, n) == Some(expected);
            notes.push(format!("|M_{n}|({k})={}", members.len()));
            for m in &members {
                for s in splits(&m.term, 2) {
                    for side in [&s.left, &s.right] {
                        let r = syntactic_rank(side).unwrap_or(usize::MAX);
                        worst = worst.max(r);
                        ok &= r <= 2 * n + 1;
                    }
                }
            }
        }
    }
    notes.push(format!("largest split-side rank {worst}"));
    Ok((ok, notes.join(", ")))
}

/// Terms whose verdicts are tracked across budgets.
pub const CLASSIFY_CORPUS: [&str; 16] = [
    "eta",
    "sh(pt[a], pt[b])",
    "sh(pt[a], pt[b], pt[a b])",
    "eta + pt[a] + eta",
    "sh(pt[a], pt[b] + pt[a])",
    "zeta",
    "omega",
    "w*(pt[])",
    "w(pt[a] + pt[b])",
    "z(pt[]) + pt[] + z(pt[])",
    "w(eta)",
    "z(eta + pt[a])",
    "pt[a] + w(pt[b])",
    "fin(3) + eta",
    "sh(pt[a], zeta)",
    "omega + w*(pt[])",
];

pub const BUDGET_LADDER: [Budgets; 3] =
    [Budgets { rank: 4, depth: 1 }, Budgets { rank: 5, depth: 2 }, Budgets { rank: 6, depth: 3 }];

fn classification_regression(engine: &Engine) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let categorical: Vec<Term> = ["eta", "sh(pt[a], pt[b])"]
        .iter()
        .map(|s| parse(s))
        .chain((0..=5).map(|k| Ok(Term::fin(k))))
        .collect::<Result<_>>()?;
    for t in &categorical {
        let v = classify(engine, t, Budgets::default())?;
        if v != Verdict::Categorical {
            ok = false;
            notes.push(format!("{t}: {}", v.name()));
        }
    }
    for text in ["zeta", "omega"] {
        let v = classify(engine, &parse(text)?, Budgets::default())?;
        if v.certificate().is_none() {
            ok = false;
            notes.push(format!("{text}: {}", v.name()));
        }
    }
    let mut moves = 0;
    for text in CLASSIFY_CORPUS {
        let t = parse(text)?;
        let mut last: Option<Verdict> = None;
        for b in BUDGET_LADDER {
            let v = classify(engine, &t, b)?;
            if let Some(prev) = &last {
                if !prev.is_unknown() && prev.name() != v.name() {
                    ok = false;
                    notes.push(format!("{text}: {} then {}", prev.name(), v.name()));
                }
                if prev.is_unknown() && !v.is_unknown() {
                    moves += 1;
                }
            }
            last = Some(v);
        }
    }
    notes.push(format!("{} corpus terms, {moves} moves from Unknown", CLASSIFY_CORPUS.len()));
    Ok((ok, notes.join("; ")))
}

fn census_tn(engine: &Engine) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 3..=5 {
        let r = verify_family(engine, ExampleFamily::Tn(n), 4, 6)?;
        ok &= r.pass && r.model_count == n && r.invariant_injective;
        notes.push(format!("T{n}: {} models, injective {}", r.model_count, r.invariant_injective));
    }
    Ok((ok, notes.join(", ")))
}

fn census_cuts(engine: &Engine) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut last = 0;
    for k0 in 1..=4 {
        let r = verify_family(engine, ExampleFamily::StepPoints { k0, n0: 2 }, 0, 5)?;
        ok &= r.pass && r.model_count == 1 << k0 && r.model_count > last;
        last = r.model_count;
        notes.push(format!("window {k0}: {}", r.model_count));
    }
    let depth = 3;
    let r = verify_family(engine, ExampleFamily::FullRationals(depth), 0, 5)?;
    ok &= r.pass;
    notes.push(format!("full rationals depth {depth}: {} models", r.model_count));
    let f = ExampleFamily::FullRationals(depth);
    let mut checked = 0;
    for m in generate_models(f, 0)? {
        let base = invariant(engine, f, &m, 5)?;
        let crate::census::ModelInvariant::Completions(set) = &base else {
            return Ok((false, "unexpected invariant".into()));
        };
        let mut choices: Vec<(usize, Completion)> = set.iter().copied().collect();
        let mut perm: Vec<usize> = (0..choices.len()).collect();
        loop {
            let listed: Vec<(usize, Completion)> = perm.iter().map(|&i| choices[i]).collect();
            let again = invariant(engine, f, &full_rationals_model(depth, &listed), 5)?;
            ok &= again == base;
            checked += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        choices.clear();
    }
    notes.push(format!("{checked} reordered completion lists"));
    Ok((ok, notes.join(", ")))
}

fn stirling2(n: usize, k: usize) -> u128 {
    match (n, k) {
        (0, 0) => 1,
        (0, _) | (_, 0) => 0,
        _ => k as u128 * stirling2(n - 1, k) + stirling2(n - 1, k - 1),
    }
}

fn structure_codec(engine: &Engine) -> Outcome {
    let language = vec![("R".to_string(), 2)];
    let mut ok = true;
    let mut notes = Vec::new();
    let counts: Vec<u128> = (0..=3).map(|n| (0..=n).map(|b| stirling2(n, b) << (b * b)).sum()).collect();
    let enumerated = (0..=3).map(|n| atomic_types(&language, n).map(|v| v.len() as u128)).collect::<Result<Vec<_>>>()?;
    let idx = type_indexing(&language, 2)?;
    let e_closed: Vec<usize> = (0..=3).map(|n| counts[..n].iter().sum::<u128>() as usize).collect();
    ok &= counts == enumerated && idx.e == e_closed;
    notes.push(format!("types {enumerated:?}, e {:?}", idx.e));

    let p = TruncParams { depth: 2, mix: 2, mixing: Mixing::Canonical };
    let reps: Vec<_> = (1..=3).map(binary_structures_up_to_iso).collect::<Result<Vec<_>>>()?.concat();
    let mut iso_pairs = 0;
    let mut inconsistent = 0;
    for a in &reps {
        let mut pi: Vec<usize> = (0..a.universe).collect();
        while next_permutation(&mut pi) {
            let r = verify_reduction(engine, a, &a.permuted(&pi), &p, 6)?;
            iso_pairs += 1;
            if !(r.iso_oracle && r.consistent) {
                inconsistent += 1;
            }
        }
    }
    let mut unseparated = 0;
    let mut worst = 0;
    let mut pairs = 0;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let r = verify_reduction(engine, &reps[i], &reps[j], &p, 6)?;
            pairs += 1;
            if r.iso_oracle || !r.consistent {
                inconsistent += 1;
            }
            match r.distinguishing_rank {
                Some(d) => worst = worst.max(d),
                None => unseparated += 1,
            }
        }
    }
    ok &= inconsistent == 0 && unseparated == 0;
    notes.push(format!(
        "{} iso classes, {iso_pairs} isomorphic pairs, {pairs} non-isomorphic pairs, {inconsistent} inconsistent, {unseparated} unseparated, max distinguishing rank {worst}",
        reps.len()
    ));
    Ok((ok, notes.join("; ")))
}

pub const LAW_CASES: u32 = 10_000;
/// Largest rank used by the randomized laws.
pub const LAW_RANK: usize = 4;

/// Small random terms over the colors `a`, `b`.
pub fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::point()),
        Just(Term::pt(["a"])),
        Just(Term::pt(["b"])),
        Just(Term::Pt(ColorSet::from_names(["a", "b"]))),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Term::sum),
            inner.clone().prop_map(Term::omega_of),
            inner.clone().prop_map(Term::omega_star_of),
            inner.clone().prop_map(Term::zeta_of),
            prop::collection::vec(inner, 1..=3).prop_map(Term::shuffle),
        ]
    })
}

/// Applies order-isomorphism-preserving rewrites at nodes picked by `seed`.
pub fn iso_rewrite(t: &Term, seed: u64) -> Term {
    let mut state = seed | 1;
    rewrite(t, &mut state)
}

fn next_bits(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

fn rewrite(t: &Term, state: &mut u64) -> Term {
    let roll = next_bits(state) % 4;
    match t {
        Term::Empty | Term::Pt(_) => t.clone(),
        Term::Sum(cs) => Term::sum(cs.iter().map(|c| rewrite(c, state))),
        Term::Omega(b) => {
            let b = rewrite(b, state);
            if roll == 0 {
                b.plus(&Term::omega_of(b.clone()))
            } else {
                Term::omega_of(b)
            }
        }
        Term::OmegaStar(b) => {
            let b = rewrite(b, state);
            if roll == 0 {
                Term::omega_star_of(b.clone()).plus(&b)
            } else {
                Term::omega_star_of(b)
            }
        }
        Term::Zeta(b) => {
            let b = rewrite(b, state);
            if roll == 0 {
                Term::omega_star_of(b.clone()).plus(&Term::omega_of(b))
            } else {
                Term::zeta_of(b)
            }
        }
        Term::Shuffle(args) => {
            let args: Vec<Term> = args.iter().map(|a| rewrite(a, state)).collect();
            let s = Term::shuffle(args.clone());
            match roll {
                0 => s.plus(&s),
                1 => {
                    let pick = &args[(next_bits(state) % args.len() as u64) as usize];
                    Term::sum([s.clone(), pick.clone(), s])
                }
                _ => s,
            }
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn engine_err(e: crate::error::CloError) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Sum congruence, shuffle invariance, splice preservation and rank
/// monotonicity over `cases` random inputs each.
pub fn algebraic_laws(engine: &Engine, cases: u32) -> Outcome {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut notes = Vec::new();
    let mut ok = true;

    let mut record = |name: &str, result: std::result::Result<(), String>| {
        match result {
            Ok(()) => notes.push(format!("{name} ok")),
            Err(e) => {
                ok = false;
                notes.push(format!("{name} failed: {e}"));
            }
        }
    };

    let mut runner = TestRunner::new(config.clone());
    let r = runner.run(
        &(term_strategy(), term_strategy(), any::<u64>(), any::<u64>(), 0..=LAW_RANK),
        |(a, b, sa, sb, n)| {
            let (a2, b2) = (iso_rewrite(&a, sa), iso_rewrite(&b, sb));
            check(engine.ef_equiv(&a, &a2, n).map_err(engine_err)?, || format!("rewrite changed {a}"))?;
            let lhs = a.plus(&b);
            let rhs = a2.plus(&b2);
            check(engine.ef_equiv(&lhs, &rhs, n).map_err(engine_err)?, || format!("{lhs} vs {rhs} at {n}"))
        },
    );
    record("sum congruence", r.map_err(|e| e.to_string()));

    let mut runner = TestRunner::new(config.clone());
    let r = runner.run(
        &(prop::collection::vec(term_strategy(), 1..=3), any::<u64>(), 0..=LAW_RANK),
        |(args, seed, n)| {
            let base = Term::shuffle(args.clone());
            let mut raw: Vec<Term> = args.iter().map(|a| iso_rewrite(a, seed)).collect();
            raw.push(raw[(seed % raw.len() as u64) as usize].clone());
            let turn = (seed >> 8) as usize % raw.len();
            raw.rotate_left(turn);
            let shuffled = Term::Shuffle(raw);
            check(engine.ef_equiv(&base, &shuffled, n).map_err(engine_err)?, || format!("{base} vs {shuffled}"))
        },
    );
    record("shuffle invariance", r.map_err(|e| e.to_string()));

    let mut runner = TestRunner::new(config.clone());
    let r = runner.run(
        &(prop::collection::vec(term_strategy(), 1..=4), any::<u64>(), 0..=LAW_RANK),
        |(parts, seed, n)| {
            let t = Term::Sum(parts.clone());
            let start = (seed % parts.len() as u64) as usize;
            let len = 1 + ((seed >> 16) as usize % (parts.len() - start));
            let block = Term::sum(parts[start..start + len].iter().cloned());
            let replacement = iso_rewrite(&block, seed >> 24);
            let spliced = splice(&t, BlockContext { start, len }, &replacement).map_err(engine_err)?;
            check(engine.ef_equiv(&t, &spliced, n).map_err(engine_err)?, || format!("{t} vs {spliced}"))
        },
    );
    record("splice preservation", r.map_err(|e| e.to_string()));

    let mut runner = TestRunner::new(config);
    let r = runner.run(&(term_strategy(), term_strategy()), |(a, b)| {
        let d = engine.distinguishing_rank(&a, &b, LAW_RANK).map_err(engine_err)?;
        for m in 0..=LAW_RANK {
            let eq = engine.ef_equiv(&a, &b, m).map_err(engine_err)?;
            check(eq == d.is_none_or(|d| m < d), || format!("{a} vs {b} at {m}"))?;
        }
        Ok(())
    });
    record("monotonicity", r.map_err(|e| e.to_string()));

    notes.push(format!("{cases} cases each"));
    Ok((ok, notes.join(", ")))
}

/// Distinct rank-`n` classes among `terms`.
pub fn class_count(engine: &Engine, terms: &[Term], n: usize) -> Result<usize> {
    let ids = terms.iter().map(|t| engine.n_theory(t, n).map(|c| c.class_id)).collect::<Result<BTreeSet<_>>>()?;
    Ok(ids.len())
}
