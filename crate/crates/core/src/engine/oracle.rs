//! Explicit finite orders and an exhaustive game search over them.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{CloError, Result};
use crate::term::{ColorSet, Term};

/// Default element cap for [`ef_oracle`].
pub const ORACLE_CAP: usize = 8;
/// Highest rank [`ef_oracle`] accepts.
pub const ORACLE_MAX_RANK: usize = 4;

/// A fully enumerated finite colored chain; element `i` has `coloring[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteOrder {
    pub size: usize,
    pub coloring: Vec<ColorSet>,
}

impl FiniteOrder {
    pub fn new(coloring: Vec<ColorSet>) -> Self {
        FiniteOrder { size: coloring.len(), coloring }
    }

    /// The term `pt[c0] + pt[c1] + …`.
    pub fn to_term(&self) -> Term {
        Term::sum(self.coloring.iter().map(|c| Term::Pt(c.clone())))
    }
}

/// The explicit order denoted by a term built from points and sums only.
pub fn finite_expand(t: &Term) -> Result<FiniteOrder> {
    let mut out = Vec::new();
    expand(t, &mut out)?;
    Ok(FiniteOrder::new(out))
}

fn expand(t: &Term, out: &mut Vec<ColorSet>) -> Result<()> {
    match t {
        Term::Empty => Ok(()),
        Term::Pt(c) => {
            out.push(c.clone());
            Ok(())
        }
        Term::Sum(cs) => cs.iter().try_for_each(|c| expand(c, out)),
        Term::Omega(_) => Err(CloError::InfiniteNode("w")),
        Term::OmegaStar(_) => Err(CloError::InfiniteNode("w*")),
        Term::Zeta(_) => Err(CloError::InfiniteNode("z")),
        Term::Shuffle(_) => Err(CloError::InfiniteNode("sh")),
    }
}

/// Decides the `n`-round game between two explicit orders by exhaustive
/// search, memoizing only exactly repeated positions.
pub fn ef_oracle(a: &FiniteOrder, b: &FiniteOrder, n: usize) -> Result<bool> {
    ef_oracle_capped(a, b, n, ORACLE_CAP)
}

pub fn ef_oracle_capped(a: &FiniteOrder, b: &FiniteOrder, n: usize, cap: usize) -> Result<bool> {
    if a.size > cap || b.size > cap {
        return Err(CloError::Guard(format!("oracle orders are limited to {cap} elements")));
    }
    if n > ORACLE_MAX_RANK {
        return Err(CloError::Guard(format!("oracle rank is limited to {ORACLE_MAX_RANK}")));
    }
    let mut palette: Vec<&ColorSet> = Vec::new();
    let ca = encode_colors(&a.coloring, &mut palette);
    let cb = encode_colors(&b.coloring, &mut palette);
    let mut game = Game { ca, cb, memo: HashMap::new() };
    Ok(game.duplicator_wins(&mut Vec::new(), n))
}

fn encode_colors<'a>(coloring: &'a [ColorSet], palette: &mut Vec<&'a ColorSet>) -> Vec<u8> {
    coloring
        .iter()
        .map(|c| match palette.iter().position(|p| *p == c) {
            Some(i) => i as u8,
            None => {
                palette.push(c);
                (palette.len() - 1) as u8
            }
        })
        .collect()
}

struct Game {
    ca: Vec<u8>,
    cb: Vec<u8>,
    memo: HashMap<(Vec<(u8, u8)>, usize), bool>,
}

impl Game {
    fn consistent(&self, pos: &[(u8, u8)], x: u8, y: u8) -> bool {
        if self.ca[x as usize] != self.cb[y as usize] {
            return false;
        }
        pos.iter().all(|&(p, q)| x.cmp(&p) == y.cmp(&q))
    }

    fn duplicator_wins(&mut self, pos: &mut Vec<(u8, u8)>, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (pos.clone(), rounds);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (na, nb) = (self.ca.len() as u8, self.cb.len() as u8);
        let mut wins = true;
        'spoiler: for side in 0..2 {
            let (own, other) = if side == 0 { (na, nb) } else { (nb, na) };
            for s in 0..own {
                let mut answered = false;
                for d in 0..other {
                    let (x, y) = if side == 0 { (s, d) } else { (d, s) };
                    if !self.consistent(pos, x, y) {
                        continue;
                    }
                    pos.push((x, y));
                    let ok = self.duplicator_wins(pos, rounds - 1);
                    pos.pop();
                    if ok {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    wins = false;
                    break 'spoiler;
                }
            }
        }
        self.memo.insert(key, wins);
        wins
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FiniteOrder {
        FiniteOrder::new(vec![ColorSet::new(); n])
    }

    #[test]
    fn chains() {
        assert!(ef_oracle(&chain(3), &chain(4), 2).unwrap());
        assert!(!ef_oracle(&chain(2), &chain(3), 2).unwrap());
        assert!(ef_oracle(&chain(1), &chain(2), 1).unwrap());
        assert!(!ef_oracle(&chain(1), &chain(2), 2).unwrap());
        assert!(ef_oracle(&chain(7), &chain(8), 3).unwrap());
        assert!(!ef_oracle(&chain(6), &chain(7), 3).unwrap());
    }

    #[test]
    fn colors_and_empty() {
        let a = FiniteOrder::new(vec![ColorSet::from_names(["a"])]);
        let b = FiniteOrder::new(vec![ColorSet::from_names(["b"])]);
        assert!(!ef_oracle(&a, &b, 1).unwrap());
        assert!(ef_oracle(&a, &b, 0).unwrap());
        assert!(!ef_oracle(&chain(0), &chain(1), 1).unwrap());
    }

    #[test]
    fn guards() {
        assert!(ef_oracle(&chain(9), &chain(1), 1).is_err());
        assert!(ef_oracle(&chain(1), &chain(1), 5).is_err());
    }

    #[test]
    fn expansion() {
        assert_eq!(finite_expand(&Term::fin(3)).unwrap(), chain(3));
        let t = Term::pt(["a"]).plus(&Term::pt(["b"]));
        assert_eq!(finite_expand(&t).unwrap().coloring, vec![ColorSet::from_names(["a"]), ColorSet::from_names(["b"])]);
        assert_eq!(finite_expand(&Term::Empty).unwrap().size, 0);
        assert!(matches!(finite_expand(&Term::eta()), Err(CloError::InfiniteNode(_))));
    }
}
