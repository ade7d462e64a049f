//! Replacing and deleting convex blocks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{classes_of_part, convex_types, ClassTable};
use crate::engine::Engine;
use crate::error::{CloError, Result};
use crate::term::Term;

/// A run of consecutive top-level summands: `t = B1 + C + B2` with `C` the
/// children `start..start+len`. A term that is not a sum has one summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockContext {
    pub start: usize,
    pub len: usize,
}

fn summands(t: &Term) -> Vec<Term> {
    match t {
        Term::Empty => Vec::new(),
        Term::Sum(cs) => cs.clone(),
        other => vec![other.clone()],
    }
}

/// The first run of top-level summands of `t` that sums to `c`.
pub fn locate_block(t: &Term, c: &Term) -> Option<BlockContext> {
    let parts = summands(t);
    let want = summands(c).len();
    if want == 0 {
        return None;
    }
    (0..parts.len().saturating_sub(want - 1))
        .find(|&i| &Term::sum(parts[i..i + want].iter().cloned()) == c)
        .map(|start| BlockContext { start, len: want })
}

/// `B1 + d + B2` for `t = B1 + C + B2` split at `ctx`.
pub fn splice(t: &Term, ctx: BlockContext, d: &Term) -> Result<Term> {
    let parts = summands(t);
    if ctx.len == 0 || ctx.start + ctx.len > parts.len() {
        return Err(CloError::InvalidContext(format!(
            "block {}..{} is outside the {} summands",
            ctx.start,
            ctx.start + ctx.len,
            parts.len()
        )));
    }
    let before = parts[..ctx.start].iter().cloned();
    let after = parts[ctx.start + ctx.len..].iter().cloned();
    Ok(Term::sum(before.chain(std::iter::once(d.clone())).chain(after)))
}

/// Deletes the elements of the given rank-`n` convex types. Each top-level
/// summand must lie entirely inside or entirely outside the deleted region.
pub fn drop_convex(engine: &Engine, t: &Term, type_ids: &BTreeSet<usize>, n: usize) -> Result<Term> {
    if type_ids.is_empty() {
        return Ok(t.clone());
    }
    let types = convex_types(engine, t, n)?;
    let mut doomed: BTreeSet<usize> = BTreeSet::new();
    for &id in type_ids {
        let ty = types
            .types
            .get(id)
            .ok_or_else(|| CloError::InvalidContext(format!("no convex type {id}")))?;
        if ty.limit {
            return Err(CloError::InvalidContext(format!("convex type {id} is a limit type with no realized block")));
        }
        doomed.extend(ty.member_classes.iter().copied());
    }
    let table = ClassTable::build(engine, t, n)?;
    let order = super::ordered(engine, t, n)?.order;
    let doomed: BTreeSet<usize> = doomed.into_iter().map(|pos| order[pos]).collect();
    let parts = summands(t);
    let mut kept = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let before = Term::sum(parts[..i].iter().cloned());
        let after = Term::sum(parts[i + 1..].iter().cloned());
        let classes = classes_of_part(engine, &table, &before, part, &after)?;
        let hit = classes.iter().filter(|c| doomed.contains(c)).count();
        if hit == 0 {
            kept.push(part.clone());
        } else if hit < classes.len() {
            return Err(CloError::InvalidContext(format!(
                "summand {i} ({part}) is only partly covered by the selected types"
            )));
        }
    }
    Ok(Term::sum(kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::one_types;
    use crate::parse::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn splice_examples() {
        let base = t("omega + zeta");
        let ctx = locate_block(&base, &t("zeta")).unwrap();
        assert_eq!(splice(&base, ctx, &t("zeta + zeta")).unwrap(), t("omega + zeta + zeta"));
        let base = t("pt[a] + eta + pt[b]");
        let ctx = locate_block(&base, &t("eta")).unwrap();
        assert_eq!(splice(&base, ctx, &t("eta + pt[c] + eta")).unwrap(), t("pt[a] + eta + pt[c] + eta + pt[b]"));
        assert!(splice(&base, BlockContext { start: 2, len: 2 }, &t("eta")).is_err());
        assert_eq!(locate_block(&t("eta"), &t("eta")), Some(BlockContext { start: 0, len: 1 }));
    }

    fn type_of_color(e: &Engine, term: &Term, color: &str, n: usize) -> usize {
        let classes = one_types(e, term, n).unwrap();
        let class = classes.iter().find(|c| c.colors.contains(color)).unwrap().id;
        let types = convex_types(e, term, n).unwrap();
        types.types.iter().find(|ty| ty.member_classes.contains(&class)).unwrap().id
    }

    #[test]
    fn drop_examples() {
        let e = Engine::default();
        let base = t("pt[a] + eta + pt[b]");
        let id = type_of_color(&e, &base, "b", 2);
        assert_eq!(drop_convex(&e, &base, &BTreeSet::from([id]), 2).unwrap(), t("pt[a] + eta"));

        let base = t("eta + pt[c] + eta");
        let id = type_of_color(&e, &base, "c", 2);
        let dropped = drop_convex(&e, &base, &BTreeSet::from([id]), 2).unwrap();
        assert_eq!(dropped, t("eta + eta"));
        assert!(e.ef_equiv(&dropped, &t("eta"), 5).unwrap());

        assert_eq!(drop_convex(&e, &base, &BTreeSet::new(), 2).unwrap(), base);
    }

    #[test]
    fn partial_cover_is_rejected() {
        let e = Engine::default();
        let base = t("pt[a] + w(pt[b])");
        let types = convex_types(&e, &base, 2).unwrap();
        let id = types.types.iter().find(|ty| ty.member_classes.contains(&1)).unwrap().id;
        let result = drop_convex(&e, &base, &BTreeSet::from([id]), 2);
        assert!(matches!(result, Err(CloError::InvalidContext(_))), "{result:?}");
    }
}
