//! Example theories as parametric families of truncated countable models.
//!
//! Infinite families of constants are cut off after finitely many; the
//! remainder is collapsed into one marker color, so the behaviour at the
//! limit stays visible in the term.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::classify::Verdict;
use crate::engine::{ClassId, Engine};
use crate::error::{CloError, Result};
use crate::term::{ColorSet, Term};

/// Largest number of models a family may generate.
pub const MODEL_LIMIT: usize = 729;
/// Largest truncation for the constant sequence of `Tn`.
pub const TRUNC_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExampleFamily {
    Zeta,
    Eta,
    Tn(usize),
    StepPoints { k0: usize, n0: usize },
    FullRationals(usize),
}

impl fmt::Display for ExampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleFamily::Zeta => write!(f, "zeta"),
            ExampleFamily::Eta => write!(f, "eta"),
            ExampleFamily::Tn(n) => write!(f, "tn({n})"),
            ExampleFamily::StepPoints { k0, n0 } => write!(f, "steppoints({k0},{n0})"),
            ExampleFamily::FullRationals(d) => write!(f, "fullrationals({d})"),
        }
    }
}

impl ExampleFamily {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(CloError::Guard(msg));
        match *self {
            ExampleFamily::Tn(n) if !(3..=8).contains(&n) => bad(format!("tn needs 3 <= n <= 8, got {n}")),
            ExampleFamily::StepPoints { k0, .. } if !(1..=4).contains(&k0) => {
                bad(format!("steppoints needs 1 <= k0 <= 4, got {k0}"))
            }
            ExampleFamily::StepPoints { n0, .. } if !(1..=6).contains(&n0) => {
                bad(format!("steppoints needs 1 <= n0 <= 6, got {n0}"))
            }
            ExampleFamily::FullRationals(d) if !(1..=16).contains(&d) => {
                bad(format!("fullrationals needs 1 <= depth <= 16, got {d}"))
            }
            _ => Ok(()),
        }
    }

    /// The classification the family is known to have.
    pub fn expected_class(&self) -> Verdict {
        match *self {
            ExampleFamily::Zeta => Verdict::BorelComplete("discrete order with no endpoints".into()),
            ExampleFamily::Eta => Verdict::Categorical,
            ExampleFamily::Tn(n) => Verdict::FiniteModels(n),
            ExampleFamily::StepPoints { .. } => Verdict::RealsLike,
            ExampleFamily::FullRationals(_) => Verdict::SetsOfRealsLike,
        }
    }

    pub fn params(&self) -> BTreeMap<&'static str, usize> {
        match *self {
            ExampleFamily::Zeta | ExampleFamily::Eta => BTreeMap::new(),
            ExampleFamily::Tn(n) => BTreeMap::from([("n", n)]),
            ExampleFamily::StepPoints { k0, n0 } => BTreeMap::from([("k0", k0), ("n0", n0)]),
            ExampleFamily::FullRationals(d) => BTreeMap::from([("depth", d)]),
        }
    }
}

/// A model as a term, with the colors that name its constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedModel {
    pub term: Term,
    pub constants: BTreeMap<String, String>,
}

impl TruncatedModel {
    /// Each constant's color marks exactly one point leaf.
    pub fn constants_are_unique(&self) -> bool {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        count_leaves(&self.term, &mut counts);
        self.constants.values().all(|c| counts.get(c.as_str()) == Some(&1))
    }
}

fn count_leaves<'a>(t: &'a Term, counts: &mut BTreeMap<&'a str, usize>) {
    match t {
        Term::Pt(c) => {
            for name in c.iter() {
                *counts.entry(name.as_str()).or_default() += 1;
            }
        }
        Term::Empty => {}
        Term::Sum(cs) | Term::Shuffle(cs) => cs.iter().for_each(|c| count_leaves(c, counts)),
        Term::Omega(b) | Term::OmegaStar(b) | Term::Zeta(b) => {
            // Leaves under a power are repeated.
            count_leaves(b, counts);
            count_leaves(b, counts);
        }
    }
}

/// How a gap in a full-rationals model is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Completion {
    Omitted,
    Point,
    Dense,
}

pub const COMPLETIONS: [Completion; 3] = [Completion::Omitted, Completion::Point, Completion::Dense];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ModelInvariant {
    Trivial,
    /// What lies directly above the constants: `cofinal`, `gap` or a color.
    LimitProfile(String),
    /// Indices of the realized cuts.
    RealizedCuts(BTreeSet<usize>),
    /// Filled sites with their completions.
    Completions(BTreeSet<(usize, Completion)>),
}

fn pt(colors: &[&str]) -> Term {
    Term::Pt(ColorSet::from_names(colors.iter().copied()))
}

fn tn_dense(n: usize) -> Term {
    Term::shuffle((0..=n - 3).map(|i| pt(&[&format!("p{i}")])))
}

/// Tails of a `Tn` model above its constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TnTail {
    Cofinal,
    Gap,
    Sup(usize),
}

pub fn tn_model(n: usize, trunc: usize, tail: TnTail) -> TruncatedModel {
    let d = tn_dense(n);
    let mut parts = Vec::new();
    let mut constants = BTreeMap::new();
    for i in 0..=trunc {
        parts.push(d.clone());
        parts.push(pt(&["p0", &format!("c{i}")]));
        constants.insert(format!("c_{i}"), format!("c{i}"));
    }
    parts.push(Term::omega_of(d.plus(&pt(&["p0", "ctail"]))));
    match tail {
        TnTail::Cofinal => {}
        TnTail::Gap => parts.push(d.clone()),
        TnTail::Sup(j) => {
            parts.push(pt(&[&format!("p{j}")]));
            parts.push(d.clone());
        }
    }
    TruncatedModel { term: Term::sum(parts), constants }
}

pub fn step_points_model(k0: usize, n0: usize, realized: &BTreeSet<usize>) -> TruncatedModel {
    let mut parts = Vec::new();
    let mut constants = BTreeMap::new();
    for k in 0..k0 {
        parts.push(Term::eta());
        if realized.contains(&k) {
            parts.push(Term::point());
        }
        parts.push(Term::omega_star_of(Term::eta().plus(&pt(&[&format!("t{k}")]))));
        for m in (2..=n0 + 1).rev() {
            let color = format!("s{k}_{m}");
            parts.push(Term::eta());
            parts.push(pt(&[&color]));
            constants.insert(format!("c_{k}+1/{m}"), color);
        }
    }
    parts.push(Term::eta());
    TruncatedModel { term: Term::sum(parts), constants }
}

/// A full-rationals model with the given completion per site. Later entries
/// for the same site override earlier ones.
pub fn full_rationals_model(depth: usize, choices: &[(usize, Completion)]) -> TruncatedModel {
    let chosen: BTreeMap<usize, Completion> = choices.iter().copied().collect();
    let mut parts = Vec::new();
    let mut constants = BTreeMap::new();
    for i in 0..depth {
        let q = format!("q{i}");
        parts.push(pt(&[&q]));
        constants.insert(format!("c_{i}"), q);
        parts.push(Term::eta());
        parts.push(Term::omega_of(pt(&[&format!("l{i}")]).plus(&Term::eta())));
        match chosen.get(&i).copied().unwrap_or(Completion::Omitted) {
            Completion::Omitted => {}
            Completion::Point => parts.push(Term::point()),
            Completion::Dense => parts.push(Term::eta()),
        }
        parts.push(Term::omega_star_of(Term::eta().plus(&pt(&[&format!("r{i}")]))));
        parts.push(Term::eta());
    }
    TruncatedModel { term: Term::sum(parts), constants }
}

fn model_guard(count: usize) -> Result<()> {
    if count > MODEL_LIMIT {
        return Err(CloError::Guard(format!("{count} models exceed the limit of {MODEL_LIMIT}")));
    }
    Ok(())
}

/// The models of a family at the given truncation. Only `Tn` uses `trunc`;
/// the other families carry their truncation in their parameters.
pub fn generate_models(f: ExampleFamily, trunc: usize) -> Result<Vec<TruncatedModel>> {
    f.check()?;
    let single = |t: Term| TruncatedModel { term: t, constants: BTreeMap::new() };
    Ok(match f {
        ExampleFamily::Zeta => vec![single(Term::zeta())],
        ExampleFamily::Eta => vec![single(Term::eta())],
        ExampleFamily::Tn(n) => {
            if trunc > TRUNC_LIMIT {
                return Err(CloError::Guard(format!("truncation is limited to {TRUNC_LIMIT}")));
            }
            let tails = [TnTail::Cofinal, TnTail::Gap].into_iter().chain((0..=n - 3).map(TnTail::Sup));
            tails.map(|tail| tn_model(n, trunc, tail)).collect()
        }
        ExampleFamily::StepPoints { k0, n0 } => (0u32..1 << k0)
            .map(|mask| {
                let realized = (0..k0).filter(|k| mask >> k & 1 == 1).collect();
                step_points_model(k0, n0, &realized)
            })
            .collect(),
        ExampleFamily::FullRationals(depth) => {
            let count = 3usize.checked_pow(depth as u32).unwrap_or(usize::MAX);
            model_guard(count)?;
            (0..count)
                .map(|code| {
                    let choices: Vec<(usize, Completion)> =
                        (0..depth).map(|i| (i, COMPLETIONS[code / 3usize.pow(i as u32) % 3])).collect();
                    full_rationals_model(depth, &choices)
                })
                .collect()
        }
    })
}

fn summands(t: &Term) -> Vec<Term> {
    match t {
        Term::Empty => Vec::new(),
        Term::Sum(cs) => cs.clone(),
        other => vec![other.clone()],
    }
}

/// Colors of the first element of `t` at rank `n`, if it has one.
fn first_color(engine: &Engine, t: &Term, n: usize) -> Option<ColorSet> {
    engine.with_store(|s| {
        let x = s.class_of(t, n);
        let e = s.empty(n - 1);
        let triples = s.triples(n, x);
        triples.iter().find(|tr| tr.left == e).map(|tr| s.color_set(tr.color).clone())
    })
}

fn has_last(engine: &Engine, t: &Term, n: usize) -> bool {
    engine.with_store(|s| {
        let x = s.class_of(t, n);
        let e = s.empty(n - 1);
        s.triples(n, x).iter().any(|tr| tr.right == e)
    })
}

fn is_constant_point(t: &Term) -> bool {
    matches!(t, Term::Pt(c) if !c.is_empty())
}

/// The family's invariant of `m`, read off the rank-`n` theories of the
/// regions around its marker sequences.
pub fn invariant(engine: &Engine, f: ExampleFamily, m: &TruncatedModel, n: usize) -> Result<ModelInvariant> {
    engine.check_rank(n)?;
    if n == 0 {
        return Err(CloError::Precondition("invariants need rank at least 1".into()));
    }
    let parts = summands(&m.term);
    let malformed = || CloError::Precondition(format!("model does not belong to {f}"));
    match f {
        ExampleFamily::Zeta | ExampleFamily::Eta => Ok(ModelInvariant::Trivial),
        ExampleFamily::Tn(_) => {
            let i = parts.iter().position(|p| matches!(p, Term::Omega(_))).ok_or_else(malformed)?;
            let above = Term::sum(parts[i + 1..].iter().cloned());
            let profile = if above.is_empty() {
                "cofinal".to_string()
            } else {
                match first_color(engine, &above, n) {
                    None => "gap".to_string(),
                    Some(c) => c.iter().cloned().collect::<Vec<_>>().join(" "),
                }
            };
            Ok(ModelInvariant::LimitProfile(profile))
        }
        ExampleFamily::StepPoints { .. } => {
            let mut realized = BTreeSet::new();
            let mut start = 0;
            let mut cut = 0;
            for (i, p) in parts.iter().enumerate() {
                if is_constant_point(p) {
                    start = i + 1;
                } else if matches!(p, Term::OmegaStar(_)) {
                    let region = Term::sum(parts[start..i].iter().cloned());
                    if has_last(engine, &region, n) {
                        realized.insert(cut);
                    }
                    cut += 1;
                }
            }
            Ok(ModelInvariant::RealizedCuts(realized))
        }
        ExampleFamily::FullRationals(_) => {
            let mut filled = BTreeSet::new();
            let mut site = 0;
            let mut open: Option<usize> = None;
            for (i, p) in parts.iter().enumerate() {
                match p {
                    Term::Omega(_) => open = Some(i + 1),
                    Term::OmegaStar(_) => {
                        let start = open.take().ok_or_else(malformed)?;
                        let region = Term::sum(parts[start..i].iter().cloned());
                        if !region.is_empty() {
                            let shape = if engine.ef_equiv(&region, &Term::point(), n)? {
                                Completion::Point
                            } else {
                                Completion::Dense
                            };
                            filled.insert((site, shape));
                        }
                        site += 1;
                    }
                    _ => {}
                }
            }
            Ok(ModelInvariant::Completions(filled))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyReport {
    pub family: String,
    pub params: BTreeMap<&'static str, usize>,
    pub trunc: usize,
    pub rank: usize,
    pub models: Vec<Term>,
    pub invariants: Vec<ModelInvariant>,
    pub model_count: usize,
    pub expected_class: Verdict,
    pub invariant_injective: bool,
    /// Least rank separating each pair of models, `None` when equivalent.
    pub pair_matrix: Vec<Vec<Option<usize>>>,
    pub pass: bool,
}

/// Generates the family's models, counts rank-`n` classes among them and
/// checks that the invariant separates exactly the inequivalent pairs.
pub fn verify_family(engine: &Engine, f: ExampleFamily, trunc: usize, n: usize) -> Result<FamilyReport> {
    engine.check_rank(n)?;
    let models = generate_models(f, trunc)?;
    let invariants = models.iter().map(|m| invariant(engine, f, m, n)).collect::<Result<Vec<_>>>()?;
    let ids: Vec<ClassId> = models.iter().map(|m| engine.n_theory(&m.term, n).map(|c| c.class_id)).collect::<Result<_>>()?;
    let pair_matrix: Vec<Vec<Option<usize>>> = engine.with_store(|s| {
        ids.iter()
            .map(|&a| {
                ids.iter()
                    .map(|&b| if a == b { None } else { (0..=n).find(|&r| s.proj_to(n, r, a) != s.proj_to(n, r, b)) })
                    .collect()
            })
            .collect()
    });
    let model_count = ids.iter().collect::<BTreeSet<_>>().len();
    let invariant_injective = (0..models.len())
        .all(|i| (0..models.len()).all(|j| (invariants[i] == invariants[j]) == (ids[i] == ids[j])));
    let expected = match f {
        ExampleFamily::Zeta | ExampleFamily::Eta => 1,
        ExampleFamily::Tn(k) => k,
        ExampleFamily::StepPoints { k0, .. } => 1 << k0,
        ExampleFamily::FullRationals(d) => 3usize.pow(d as u32),
    };
    let constants_ok = models.iter().all(TruncatedModel::constants_are_unique);
    Ok(FamilyReport {
        family: f.to_string(),
        params: f.params(),
        trunc,
        rank: n,
        models: models.into_iter().map(|m| m.term).collect(),
        invariants,
        model_count,
        expected_class: f.expected_class(),
        invariant_injective,
        pair_matrix,
        pass: model_count == expected && invariant_injective && constants_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tn_model_counts() {
        assert_eq!(generate_models(ExampleFamily::Tn(3), 4).unwrap().len(), 3);
        assert_eq!(generate_models(ExampleFamily::Tn(6), 2).unwrap().len(), 6);
        assert!(generate_models(ExampleFamily::Tn(2), 2).is_err());
        assert_eq!(generate_models(ExampleFamily::Zeta, 0).unwrap()[0].term, Term::zeta());
    }

    #[test]
    fn tn_profiles() {
        let m = tn_model(4, 2, TnTail::Gap);
        assert_eq!(invariant(&Engine::default(), ExampleFamily::Tn(4), &m, 3).unwrap(), ModelInvariant::LimitProfile("gap".into()));
        let m = tn_model(4, 2, TnTail::Sup(1));
        assert_eq!(invariant(&Engine::default(), ExampleFamily::Tn(4), &m, 3).unwrap(), ModelInvariant::LimitProfile("p1".into()));
        let m = tn_model(4, 2, TnTail::Cofinal);
        assert_eq!(invariant(&Engine::default(), ExampleFamily::Tn(4), &m, 3).unwrap(), ModelInvariant::LimitProfile("cofinal".into()));
        assert!(m.constants_are_unique());
    }

    #[test]
    fn step_points_cuts() {
        let f = ExampleFamily::StepPoints { k0: 3, n0: 2 };
        let m = step_points_model(3, 2, &BTreeSet::from([0, 2]));
        assert!(m.constants_are_unique());
        assert_eq!(invariant(&Engine::default(), f, &m, 3).unwrap(), ModelInvariant::RealizedCuts(BTreeSet::from([0, 2])));
        assert_eq!(generate_models(f, 0).unwrap().len(), 8);
    }

    #[test]
    fn full_rationals_order_insensitive() {
        let f = ExampleFamily::FullRationals(3);
        let a = full_rationals_model(3, &[(0, Completion::Dense), (2, Completion::Point)]);
        let b = full_rationals_model(3, &[(2, Completion::Point), (0, Completion::Dense)]);
        assert_eq!(a, b);
        let inv = invariant(&Engine::default(), f, &a, 3).unwrap();
        assert_eq!(inv, ModelInvariant::Completions(BTreeSet::from([(0, Completion::Dense), (2, Completion::Point)])));
        assert!(generate_models(ExampleFamily::FullRationals(7), 0).is_err());
    }

    #[test]
    fn small_reports() {
        let e = Engine::default();
        let r = verify_family(&e, ExampleFamily::Eta, 0, 4).unwrap();
        assert_eq!((r.model_count, r.pass, r.expected_class), (1, true, Verdict::Categorical));
        let r = verify_family(&e, ExampleFamily::StepPoints { k0: 1, n0: 3 }, 0, 5).unwrap();
        assert!(r.invariant_injective && r.pass);
        assert_eq!(r.expected_class, Verdict::RealsLike);
        let r = verify_family(&e, ExampleFamily::Tn(3), 4, 6).unwrap();
        assert_eq!(r.model_count, 3);
        assert!(r.pass, "{r:?}");
    }
}
