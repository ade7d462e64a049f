//! Term-level decompositions at an element.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::term::{ColorSet, Term};

/// `left + {point} + right`, a decomposition of a term at one element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SplitTriple {
    pub left: Term,
    pub point: ColorSet,
    pub right: Term,
}

impl fmt::Display for SplitTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {} | {})", self.left, self.point, self.right)
    }
}

/// Copy cap for ω / ω*-sums at rank `n`.
pub fn copy_cap(n: usize) -> u64 {
    1u64 << n.min(62)
}

/// The decompositions of `t` used at rank `n`, with copy indices
/// `0..=copy_cap(n)` for ω / ω*-sums.
pub fn splits(t: &Term, n: usize) -> BTreeSet<SplitTriple> {
    splits_with_cap(t, copy_cap(n))
}

pub fn splits_with_cap(t: &Term, cap: u64) -> BTreeSet<SplitTriple> {
    let mut out = BTreeSet::new();
    collect(t, cap, &mut out);
    out
}

fn collect(t: &Term, cap: u64, out: &mut BTreeSet<SplitTriple>) {
    match t {
        Term::Empty => {}
        Term::Pt(c) => {
            out.insert(SplitTriple { left: Term::Empty, point: c.clone(), right: Term::Empty });
        }
        Term::Sum(cs) => {
            for (i, child) in cs.iter().enumerate() {
                let before = Term::sum(cs[..i].iter().cloned());
                let after = Term::sum(cs[i + 1..].iter().cloned());
                for s in splits_with_cap(child, cap) {
                    out.insert(SplitTriple {
                        left: before.plus(&s.left),
                        point: s.point,
                        right: s.right.plus(&after),
                    });
                }
            }
        }
        Term::Omega(a) => {
            let inner = splits_with_cap(a, cap);
            for k in 0..=cap {
                let prefix = a.repeat(k as usize);
                for s in &inner {
                    out.insert(SplitTriple {
                        left: prefix.plus(&s.left),
                        point: s.point.clone(),
                        right: s.right.plus(t),
                    });
                }
            }
        }
        Term::OmegaStar(a) => {
            let inner = splits_with_cap(a, cap);
            for k in 0..=cap {
                let suffix = a.repeat(k as usize);
                for s in &inner {
                    out.insert(SplitTriple {
                        left: t.plus(&s.left),
                        point: s.point.clone(),
                        right: s.right.plus(&suffix),
                    });
                }
            }
        }
        Term::Zeta(a) => {
            let ws = Term::omega_star_of((**a).clone());
            let w = Term::omega_of((**a).clone());
            for s in splits_with_cap(a, cap) {
                out.insert(SplitTriple { left: ws.plus(&s.left), point: s.point, right: s.right.plus(&w) });
            }
        }
        Term::Shuffle(args) => {
            for a in args {
                for s in splits_with_cap(a, cap) {
                    out.insert(SplitTriple { left: t.plus(&s.left), point: s.point, right: s.right.plus(t) });
                }
            }
        }
    }
}
