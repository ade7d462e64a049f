//! The condensation relation `∼` on sampled elements.
//!
//! Neighbouring samples `a < b` are linked when a convex bounded set,
//! definable over one of them, contains both: seen from `a`, the least
//! definable initial segment of the order above `a` that contains `b` must
//! leave something above it (and `a` must have something below it), or the
//! mirror statement seen from `b`. Classes are the transitive closure of
//! these links.

use std::collections::HashMap;

use serde::Serialize;

use super::sample::{sample, Sample, Window};
use super::{all, require_many_points, self_additive_at, ClassTable, OrbitRep};
use crate::engine::{Engine, Triple};
use crate::error::{CloError, Result};
use crate::term::Term;

/// Window used for condensation samples.
pub const CONDENSE_WINDOW: Window = Window { omega: 3, zeta: 2, shuffle_rounds: 2, limit: 400 };

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condensation {
    pub rank: usize,
    pub classes: Vec<Vec<OrbitRep>>,
    /// Same partition of the samples at rank `n-1`.
    pub stable: bool,
}

impl Condensation {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// The `∼`-classes among sampled elements at rank `n`. Requires `t` to be
/// self-additive at rank `n`.
pub fn condensation_at(engine: &Engine, t: &Term, n: usize) -> Result<Condensation> {
    require_many_points(t)?;
    if !self_additive_at(engine, t, n)? {
        return Err(CloError::Precondition(format!("term is not self-additive at rank {n}")));
    }
    let set = sample(t, &CONDENSE_WINDOW)?;
    let blocks = partition(engine, &set.samples, &set.gaps, n)?;
    let stable = n > 0 && partition(engine, &set.samples, &set.gaps, n - 1)? == blocks;
    let classes = blocks
        .iter()
        .map(|b| b.iter().map(|&i| OrbitRep::of(&set.samples[i])).collect())
        .collect();
    Ok(Condensation { rank: n, classes, stable })
}

/// Runs of linked neighbours, as index lists.
pub(crate) fn partition(engine: &Engine, samples: &[Sample], gaps: &[Term], n: usize) -> Result<Vec<Vec<usize>>> {
    let mut tables: HashMap<Term, ClassTable> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..samples.len() {
        let joined = i > 0 && linked(engine, &mut tables, &samples[i - 1], &gaps[i - 1], &samples[i], n)?;
        match out.last_mut() {
            Some(run) if joined => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    Ok(out)
}

fn table<'a>(engine: &Engine, cache: &'a mut HashMap<Term, ClassTable>, t: &Term, n: usize) -> Result<&'a ClassTable> {
    if !cache.contains_key(t) {
        let built = ClassTable::build(engine, t, n)?;
        cache.insert(t.clone(), built);
    }
    Ok(&cache[t])
}

fn linked(
    engine: &Engine,
    cache: &mut HashMap<Term, ClassTable>,
    a: &Sample,
    gap: &Term,
    b: &Sample,
    n: usize,
) -> Result<bool> {
    if !a.left.is_empty() {
        let key = engine.with_store(|s| Triple {
            left: s.class_of(gap, n),
            color: s.color(&b.point),
            right: s.class_of(&b.right, n),
        });
        let above = table(engine, cache, &a.right, n)?;
        let i = above.index_of(&key).ok_or_else(|| CloError::Precondition("sample class missing".into()))?;
        if !all(&above.down_closure(above.singleton(i))) {
            return Ok(true);
        }
    }
    if !b.right.is_empty() {
        let key = engine.with_store(|s| Triple {
            left: s.class_of(&a.left, n),
            color: s.color(&a.point),
            right: s.class_of(gap, n),
        });
        let below = table(engine, cache, &b.left, n)?;
        let i = below.index_of(&key).ok_or_else(|| CloError::Precondition("sample class missing".into()))?;
        if !all(&below.up_closure(below.singleton(i))) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn zeta_sums() {
        let e = Engine::default();
        for k in 1..=3 {
            let t = Term::zeta().repeat(k);
            let c = condensation_at(&e, &t, 2).unwrap();
            assert_eq!(c.class_count(), k, "k = {k}");
        }
    }

    #[test]
    fn eta_is_discrete_under_condensation() {
        let e = Engine::default();
        let c = condensation_at(&e, &Term::eta(), 2).unwrap();
        assert!(c.classes.iter().all(|cl| cl.len() == 1));
        assert!(c.class_count() > 1);
    }

    #[test]
    fn requires_self_additivity() {
        let e = Engine::default();
        assert!(condensation_at(&e, &parse("omega").unwrap(), 2).is_err());
    }
}
