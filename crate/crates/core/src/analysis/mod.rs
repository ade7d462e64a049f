//! Rank-bounded analysis of one-types, definable convex sets,
//! self-additivity and convex types.
//!
//! At rank `n` an element's class is its cut triple
//! `(class_n(L), colors, class_n(R))`, read off the rank-`(n+1)` class of the
//! whole term. Convexity questions are answered with the rank-`(n+1)` element
//! types, each of which determines the rank-`n` classes occurring below and
//! above the element.

pub mod condense;
pub mod edit;
pub mod sample;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::engine::{copy_cap, Characteristic, Engine, Triple};
use crate::error::{CloError, Result};
use crate::term::{Address, ColorSet, Term};

pub use condense::{condensation_at, Condensation};
pub use edit::{drop_convex, locate_block, splice, BlockContext};
pub use sample::{sample, Sample, SampleSet, Window};

/// Largest number of definable convex sets enumerated.
pub const CONVEX_SET_LIMIT: usize = 50_000;

/// Which elements an orbit representative stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Multiplicity {
    Single,
    UnboundedFamily(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRep {
    pub address: Address,
    pub multiplicity: Multiplicity,
}

impl OrbitRep {
    fn of(s: &Sample) -> Self {
        let multiplicity = if s.families.is_empty() {
            Multiplicity::Single
        } else {
            Multiplicity::UnboundedFamily(s.families.join("; "))
        };
        OrbitRep { address: s.address.clone(), multiplicity }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneTypeClass {
    pub id: usize,
    pub left: Characteristic,
    pub colors: ColorSet,
    pub right: Characteristic,
    pub members: Vec<OrbitRep>,
}

/// A rank-`n` convex type. Limit types carry the local descriptor of the
/// repeating block they come from and have no realized member classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexNType {
    pub id: usize,
    pub member_classes: Vec<usize>,
    pub isolated_at_rank: bool,
    pub limit: bool,
    pub descriptor: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexTypes {
    pub types: Vec<ConvexNType>,
    /// Set when repetition nodes nest, in which case further limit types
    /// may exist that this analysis does not list.
    pub nested_families: bool,
}

#[derive(Debug, Clone)]
struct YType {
    class: usize,
    below: Vec<bool>,
    above: Vec<bool>,
}

/// The rank-`n` classes of a term with the element types needed for
/// convexity.
#[derive(Debug, Clone)]
pub struct ClassTable {
    pub rank: usize,
    pub classes: Vec<Triple>,
    index: HashMap<Triple, usize>,
    ytypes: Vec<YType>,
}

pub type ClassSet = Vec<bool>;

impl ClassTable {
    pub fn build(engine: &Engine, t: &Term, n: usize) -> Result<ClassTable> {
        engine.check_rank(n + 2)?;
        engine.check_term(t)?;
        Ok(engine.with_store(|s| {
            let top = s.class_of(t, n + 2);
            let whole = s.proj(n + 2, top);
            let classes: Vec<Triple> = s.triples(n + 1, whole).to_vec();
            let index: HashMap<Triple, usize> = classes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
            let k = classes.len();
            let mut ytypes = Vec::new();
            for y in s.triples(n + 2, top).iter() {
                let pl = s.proj(n + 1, y.left);
                let pr = s.proj(n + 1, y.right);
                let class = index[&Triple { left: pl, color: y.color, right: pr }];
                let pt = s.point_id(n, y.color);
                let mut below = vec![false; k];
                let here_and_right = s.sum(n, pt, pr);
                for z in s.triples(n + 1, y.left).iter() {
                    let right = s.sum(n, z.right, here_and_right);
                    below[index[&Triple { left: z.left, color: z.color, right }]] = true;
                }
                let mut above = vec![false; k];
                let left_and_here = s.sum(n, pl, pt);
                for z in s.triples(n + 1, y.right).iter() {
                    let left = s.sum(n, left_and_here, z.left);
                    above[index[&Triple { left, color: z.color, right: z.right }]] = true;
                }
                ytypes.push(YType { class, below, above });
            }
            ClassTable { rank: n, classes, index, ytypes }
        }))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, c: &Triple) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn singleton(&self, i: usize) -> ClassSet {
        let mut s = vec![false; self.len()];
        s[i] = true;
        s
    }

    fn grow(&self, set: &mut ClassSet, admit: impl Fn(&YType, &ClassSet) -> bool) {
        loop {
            let mut changed = false;
            for y in &self.ytypes {
                if !set[y.class] && admit(y, set) {
                    set[y.class] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Least convex union of classes containing `set`.
    pub fn convex_closure(&self, mut set: ClassSet) -> ClassSet {
        self.grow(&mut set, |y, s| meets(&y.below, s) && meets(&y.above, s));
        set
    }

    /// Least downward-closed union of classes containing `set`.
    pub fn down_closure(&self, mut set: ClassSet) -> ClassSet {
        self.grow(&mut set, |y, s| meets(&y.above, s));
        set
    }

    /// Least upward-closed union of classes containing `set`.
    pub fn up_closure(&self, mut set: ClassSet) -> ClassSet {
        self.grow(&mut set, |y, s| meets(&y.below, s));
        set
    }
}

fn meets(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).any(|(x, y)| *x && *y)
}

fn all(set: &[bool]) -> bool {
    set.iter().all(|&x| x)
}

fn members(set: &[bool]) -> Vec<usize> {
    set.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect()
}

/// Class table together with the element order of its classes.
struct Ordered {
    table: ClassTable,
    /// `order[i]` is the table index of the `i`-th class.
    order: Vec<usize>,
    reps: Vec<Vec<OrbitRep>>,
}

fn ordered(engine: &Engine, t: &Term, n: usize) -> Result<Ordered> {
    let table = ClassTable::build(engine, t, n)?;
    let set = sample(t, &Window::covering(copy_cap(n + 1)))?;
    let mut order = Vec::new();
    let mut reps: Vec<Vec<OrbitRep>> = vec![Vec::new(); table.len()];
    for s in &set.samples {
        let key = engine.with_store(|st| Triple {
            left: st.class_of(&s.left, n),
            color: st.color(&s.point),
            right: st.class_of(&s.right, n),
        });
        let i = table
            .index_of(&key)
            .ok_or_else(|| CloError::Precondition("sampled element has no class".into()))?;
        if reps[i].is_empty() {
            order.push(i);
        }
        reps[i].push(OrbitRep::of(s));
    }
    for i in 0..table.len() {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    Ok(Ordered { table, order, reps })
}

/// Rank-`n` one-type classes of `t` in element order.
pub fn one_types(engine: &Engine, t: &Term, n: usize) -> Result<Vec<OneTypeClass>> {
    let o = ordered(engine, t, n)?;
    Ok(o.order
        .iter()
        .enumerate()
        .map(|(id, &i)| {
            let c = o.table.classes[i];
            let colors = engine.with_store(|s| s.color_set(c.color).clone());
            OneTypeClass {
                id,
                left: Characteristic { rank: n, class_id: c.left },
                colors,
                right: Characteristic { rank: n, class_id: c.right },
                members: o.reps[i].clone(),
            }
        })
        .collect())
}

/// All convex unions of rank-`n` classes, as sets of class ids in element
/// order. Always contains `∅` and the full set.
pub fn definable_convex_sets(engine: &Engine, t: &Term, n: usize) -> Result<Vec<BTreeSet<usize>>> {
    let o = ordered(engine, t, n)?;
    let table = &o.table;
    let mut pos = vec![0usize; table.len()];
    for (id, &i) in o.order.iter().enumerate() {
        pos[i] = id;
    }
    let start: ClassSet = vec![false; table.len()];
    let mut seen: HashSet<ClassSet> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for c in 0..table.len() {
            if cur[c] {
                continue;
            }
            let mut next = cur.clone();
            next[c] = true;
            let next = table.convex_closure(next);
            if seen.insert(next.clone()) {
                if seen.len() > CONVEX_SET_LIMIT {
                    return Err(CloError::Guard(format!("more than {CONVEX_SET_LIMIT} convex sets")));
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<BTreeSet<usize>> =
        seen.into_iter().map(|s| members(&s).into_iter().map(|i| pos[i]).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

fn require_many_points(t: &Term) -> Result<()> {
    if t.is_degenerate() {
        Err(CloError::Precondition("self-additivity needs an order with more than one point".into()))
    } else {
        Ok(())
    }
}

/// True iff the only rank-`n` definable convex sets are `∅` and everything.
pub fn self_additive_at(engine: &Engine, t: &Term, n: usize) -> Result<bool> {
    require_many_points(t)?;
    let table = ClassTable::build(engine, t, n)?;
    Ok((0..table.len()).all(|c| all(&table.convex_closure(table.singleton(c)))))
}

/// Rank-`n` convex types: classes grouped by whether some definable convex
/// set separates them, plus one limit type per repetition node.
pub fn convex_types(engine: &Engine, t: &Term, n: usize) -> Result<ConvexTypes> {
    let o = ordered(engine, t, n)?;
    let table = &o.table;
    let closures: Vec<ClassSet> = (0..table.len()).map(|c| table.convex_closure(table.singleton(c))).collect();
    let mut assigned = vec![false; table.len()];
    let mut types = Vec::new();
    for &c in &o.order {
        if assigned[c] {
            continue;
        }
        let mut group = vec![false; table.len()];
        for d in 0..table.len() {
            if closures[c][d] && closures[d][c] {
                group[d] = true;
                assigned[d] = true;
            }
        }
        let isolated = table.convex_closure(group.clone()) == group;
        let member_classes = o
            .order
            .iter()
            .enumerate()
            .filter(|(_, &i)| group[i])
            .map(|(id, _)| id)
            .collect();
        types.push(ConvexNType {
            id: types.len(),
            member_classes,
            isolated_at_rank: isolated,
            limit: false,
            descriptor: None,
        });
    }
    let mut nested = false;
    collect_limits(t, false, &mut types, &mut nested);
    Ok(ConvexTypes { types, nested_families: nested })
}

fn collect_limits(t: &Term, inside: bool, out: &mut Vec<ConvexNType>, nested: &mut bool) {
    match t {
        Term::Empty | Term::Pt(_) => {}
        Term::Sum(cs) | Term::Shuffle(cs) => cs.iter().for_each(|c| collect_limits(c, inside, out, nested)),
        Term::Omega(b) | Term::OmegaStar(b) | Term::Zeta(b) => {
            if inside {
                *nested = true;
            }
            out.push(ConvexNType {
                id: out.len(),
                member_classes: Vec::new(),
                isolated_at_rank: false,
                limit: true,
                descriptor: Some(Term::zeta_of((**b).clone())),
            });
            collect_limits(b, true, out, nested);
        }
    }
}

/// Repetition nodes of `t` in preorder with their kind.
pub fn family_nodes(t: &Term) -> Vec<(&'static str, Term)> {
    let mut out = Vec::new();
    fn go(t: &Term, out: &mut Vec<(&'static str, Term)>) {
        match t {
            Term::Empty | Term::Pt(_) => {}
            Term::Sum(cs) | Term::Shuffle(cs) => cs.iter().for_each(|c| go(c, out)),
            Term::Omega(b) => {
                out.push(("ω-tail", (**b).clone()));
                go(b, out);
            }
            Term::OmegaStar(b) => {
                out.push(("ω*-tail", (**b).clone()));
                go(b, out);
            }
            Term::Zeta(b) => {
                out.push(("ζ-block", (**b).clone()));
                go(b, out);
            }
        }
    }
    go(t, &mut out);
    out
}

fn unique_condensation_class(engine: &Engine, t: &Term, n: usize) -> Result<bool> {
    if t.is_degenerate() || !self_additive_at(engine, t, n)? {
        return Ok(false);
    }
    Ok(condensation_at(engine, t, n)?.class_count() == 1)
}

/// Evidence that `th(t)` is not categorical, found with classes of rank
/// `rank_budget - 2`: either `t` itself is self-additive with a single
/// condensation class, or the ζ-sum of some repeated block is.
pub fn noncategorical_certificate(engine: &Engine, t: &Term, rank_budget: usize) -> Result<Option<String>> {
    let n = rank_budget.saturating_sub(2);
    if unique_condensation_class(engine, t, n)? {
        return Ok(Some(format!(
            "unique ∼-class: self-additive at rank {n} with a single condensation class among sampled elements"
        )));
    }
    for (kind, body) in family_nodes(t) {
        let local = Term::zeta_of(body);
        if unique_condensation_class(engine, &local, n)? {
            return Ok(Some(format!(
                "non-categorical {kind}: local theory {local} is self-additive at rank {n} with a unique ∼-class"
            )));
        }
    }
    Ok(None)
}

/// The rank-`n` class ids of the elements of `part`, where `t` is
/// `before + part + after`.
pub fn classes_of_part(
    engine: &Engine,
    table: &ClassTable,
    before: &Term,
    part: &Term,
    after: &Term,
) -> Result<BTreeSet<usize>> {
    let n = table.rank;
    let keys: Vec<Triple> = engine.with_store(|s| {
        let b = s.class_of(before, n);
        let a = s.class_of(after, n);
        let whole = s.class_of(part, n + 1);
        s.triples(n + 1, whole)
            .iter()
            .map(|z| {
                let left = s.sum(n, b, z.left);
                let right = s.sum(n, z.right, a);
                Triple { left, color: z.color, right }
            })
            .collect()
    });
    keys.iter()
        .map(|k| table.index_of(k).ok_or_else(|| CloError::InvalidContext("part is not a block of the term".into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn one_type_counts() {
        let e = Engine::default();
        for n in 0..=4 {
            assert_eq!(one_types(&e, &t("eta"), n).unwrap().len(), 1);
            assert_eq!(one_types(&e, &t("sh(pt[a], pt[b])"), n).unwrap().len(), 2);
        }
        let w = one_types(&e, &t("omega"), 1).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].members.len(), 1);
        assert_eq!(w[0].members[0].multiplicity, Multiplicity::Single);
    }

    #[test]
    fn convex_sets() {
        let e = Engine::default();
        assert_eq!(definable_convex_sets(&e, &t("eta"), 3).unwrap().len(), 2);
        assert_eq!(definable_convex_sets(&e, &t("zeta"), 3).unwrap().len(), 2);
        let w = definable_convex_sets(&e, &t("omega"), 1).unwrap();
        let expected: Vec<BTreeSet<usize>> =
            vec![BTreeSet::new(), BTreeSet::from([0]), BTreeSet::from([1]), BTreeSet::from([0, 1])];
        assert_eq!(w, expected);
    }

    #[test]
    fn self_additivity() {
        let e = Engine::default();
        for n in 0..=4 {
            assert!(self_additive_at(&e, &t("zeta"), n).unwrap());
            assert!(self_additive_at(&e, &t("eta"), n).unwrap());
        }
        assert!(!self_additive_at(&e, &t("omega"), 1).unwrap());
        assert!(!self_additive_at(&e, &t("zeta + pt[] + zeta"), 2).unwrap());
        assert!(!self_additive_at(&e, &t("pt[] + eta"), 1).unwrap());
        assert!(self_additive_at(&e, &Term::point(), 1).is_err());
    }

    #[test]
    fn convex_type_shapes() {
        let e = Engine::default();
        let eta = convex_types(&e, &t("eta"), 2).unwrap();
        assert_eq!(eta.types.len(), 1);
        assert!(eta.types[0].isolated_at_rank);

        let w = convex_types(&e, &t("omega"), 2).unwrap();
        let limits: Vec<_> = w.types.iter().filter(|c| c.limit).collect();
        assert_eq!(limits.len(), 1);
        assert_eq!(limits[0].descriptor, Some(Term::zeta()));
        assert!(w.types.iter().filter(|c| !c.limit).all(|c| c.isolated_at_rank));

        let sh = convex_types(&e, &t("sh(pt[a], pt[b])"), 2).unwrap();
        assert_eq!(sh.types.len(), 1);
        assert_eq!(sh.types[0].member_classes, vec![0, 1]);
    }
}
