//! Spoiler strategies for inequivalent pairs, and an independent replay
//! checker that uses only term-level splits.

use std::collections::BTreeSet;

use serde::Serialize;

use super::splits::{splits, SplitTriple};
use super::Engine;
use crate::error::{CloError, Result};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// Why a Duplicator reply loses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Refutation {
    /// The chosen points carry different colors.
    Color,
    /// Spoiler wins the remaining game on the parts left of the chosen points.
    Left(Box<Strategy>),
    /// Spoiler wins the remaining game on the parts right of the chosen points.
    Right(Box<Strategy>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reply {
    pub reply: SplitTriple,
    pub refutation: Refutation,
}

/// A winning Spoiler strategy for the `rank`-round game on `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Strategy {
    pub rank: usize,
    pub a: Term,
    pub b: Term,
    pub side: Side,
    pub spoiler: SplitTriple,
    pub replies: Vec<Reply>,
}

impl Strategy {
    /// Number of strategy nodes.
    pub fn size(&self) -> usize {
        1 + self
            .replies
            .iter()
            .map(|r| match &r.refutation {
                Refutation::Color => 0,
                Refutation::Left(s) | Refutation::Right(s) => s.size(),
            })
            .sum::<usize>()
    }

    /// Length of the longest play.
    pub fn depth(&self) -> usize {
        1 + self
            .replies
            .iter()
            .map(|r| match &r.refutation {
                Refutation::Color => 0,
                Refutation::Left(s) | Refutation::Right(s) => s.depth(),
            })
            .max()
            .unwrap_or(0)
    }

    /// Indented text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        let side = match self.side {
            Side::A => "A",
            Side::B => "B",
        };
        out.push_str(&format!("{pad}round {}: Spoiler plays in {side} at {}\n", self.rank, self.spoiler));
        for r in &self.replies {
            match &r.refutation {
                Refutation::Color => out.push_str(&format!("{pad}  reply {}: colors differ\n", r.reply)),
                Refutation::Left(s) => {
                    out.push_str(&format!("{pad}  reply {}: continue on the left parts\n", r.reply));
                    s.render_into(indent + 2, out);
                }
                Refutation::Right(s) => {
                    out.push_str(&format!("{pad}  reply {}: continue on the right parts\n", r.reply));
                    s.render_into(indent + 2, out);
                }
            }
        }
    }
}

impl Engine {
    /// A Spoiler strategy witnessing `a ≢_n b`.
    pub fn witness(&self, a: &Term, b: &Term, n: usize) -> Result<Strategy> {
        if self.ef_equiv(a, b, n)? {
            return Err(CloError::Precondition(format!("the terms are equivalent at rank {n}")));
        }
        let mut budget = self.cfg.witness_limit;
        self.build(a, b, n, &mut budget)
    }

    fn build(&self, a: &Term, b: &Term, n: usize, budget: &mut usize) -> Result<Strategy> {
        if *budget == 0 {
            return Err(CloError::Budget("witness tree exceeds node limit".into()));
        }
        *budget -= 1;
        let lower = n - 1;
        for side in [Side::A, Side::B] {
            let (own, other) = match side {
                Side::A => (a, b),
                Side::B => (b, a),
            };
            let reachable = self.with_store(|s| {
                let id = s.class_of(other, n);
                s.triples(n, id).iter().copied().collect::<BTreeSet<_>>()
            });
            for mv in splits(own, n) {
                let key = self.with_store(|s| super::Triple {
                    left: s.class_of(&mv.left, lower),
                    color: s.color(&mv.point),
                    right: s.class_of(&mv.right, lower),
                });
                if reachable.contains(&key) {
                    continue;
                }
                let mut replies = Vec::new();
                for reply in splits(other, n) {
                    let (sa, sb) = match side {
                        Side::A => (&mv, &reply),
                        Side::B => (&reply, &mv),
                    };
                    let refutation = if sa.point != sb.point {
                        Refutation::Color
                    } else if !self.ef_equiv(&sa.left, &sb.left, lower)? {
                        Refutation::Left(Box::new(self.build(&sa.left, &sb.left, lower, budget)?))
                    } else {
                        Refutation::Right(Box::new(self.build(&sa.right, &sb.right, lower, budget)?))
                    };
                    replies.push(Reply { reply, refutation });
                }
                return Ok(Strategy { rank: n, a: a.clone(), b: b.clone(), side, spoiler: mv, replies });
            }
        }
        Err(CloError::Precondition(
            "no unmatched split found; split enumeration disagrees with the class computation".into(),
        ))
    }
}

/// Replays a strategy against `(a, b)` using only split enumeration and
/// color comparison.
pub fn check_witness(a: &Term, b: &Term, st: &Strategy) -> std::result::Result<(), String> {
    if &st.a != a || &st.b != b {
        return Err(format!("strategy is for ({}, {}), not ({a}, {b})", st.a, st.b));
    }
    if st.rank == 0 {
        return Err("no strategy wins a game of zero rounds".into());
    }
    let (own, other) = match st.side {
        Side::A => (a, b),
        Side::B => (b, a),
    };
    if !splits(own, st.rank).contains(&st.spoiler) {
        return Err(format!("spoiler move {} is not a split of {own}", st.spoiler));
    }
    let expected = splits(other, st.rank);
    let answered: BTreeSet<SplitTriple> = st.replies.iter().map(|r| r.reply.clone()).collect();
    if answered != expected {
        return Err(format!("replies do not cover the splits of {other}"));
    }
    for r in &st.replies {
        let (sa, sb) = match st.side {
            Side::A => (&st.spoiler, &r.reply),
            Side::B => (&r.reply, &st.spoiler),
        };
        match &r.refutation {
            Refutation::Color => {
                if sa.point == sb.point {
                    return Err(format!("reply {} has matching colors", r.reply));
                }
            }
            Refutation::Left(sub) | Refutation::Right(sub) => {
                if sub.rank >= st.rank {
                    return Err("sub-strategy does not decrease rank".into());
                }
                let (pa, pb) = match &r.refutation {
                    Refutation::Left(_) => (&sa.left, &sb.left),
                    _ => (&sa.right, &sb.right),
                };
                check_witness(pa, pb, sub)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn first_element_strategy() {
        let e = Engine::default();
        let (a, b) = (t("omega"), t("zeta"));
        let w = e.witness(&a, &b, 2).unwrap();
        assert_eq!(w.side, Side::A);
        assert_eq!(w.spoiler.left, Term::Empty);
        assert!(check_witness(&a, &b, &w).is_ok());
        assert!(w.depth() <= 2);
    }

    #[test]
    fn color_mismatch() {
        let e = Engine::default();
        let (a, b) = (t("pt[a]"), t("pt[b]"));
        let w = e.witness(&a, &b, 1).unwrap();
        assert_eq!(w.replies.len(), 1);
        assert_eq!(w.replies[0].refutation, Refutation::Color);
        assert!(check_witness(&a, &b, &w).is_ok());
    }

    #[test]
    fn short_chains() {
        let e = Engine::default();
        let (a, b) = (t("fin(2)"), t("fin(3)"));
        let w = e.witness(&a, &b, 2).unwrap();
        assert_eq!(w.depth(), 2);
        assert!(check_witness(&a, &b, &w).is_ok());
    }

    #[test]
    fn rejects_equivalent_pairs_and_tampering() {
        let e = Engine::default();
        assert!(e.witness(&t("eta"), &t("eta + eta"), 3).is_err());
        let (a, b) = (t("omega"), t("zeta"));
        let mut w = e.witness(&a, &b, 2).unwrap();
        w.replies.pop();
        assert!(check_witness(&a, &b, &w).is_err());
    }
}
