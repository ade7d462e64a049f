//! The characteristic algebra.
//!
//! The rank-`r` class of an order `A` is the set of triples
//! `(class_{r-1}(L), colors(x), class_{r-1}(R))` over all decompositions
//! `A = L + {x} + R`. Two orders have the same rank-`r` class exactly when
//! Duplicator wins the `r`-round game between them. Classes are interned per
//! rank and every term operation is computed directly on class ids, which is
//! sound because rank-`r` classes are a congruence for sums, ω/ω*/ζ-sums and
//! shuffles.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{CloError, Result};
use crate::term::{ColorSet, Term};

pub type ClassId = u32;
pub type ColorId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub left: ClassId,
    pub color: ColorId,
    pub right: ClassId,
}

/// Algebra settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraConfig {
    /// Multiplier on the copy cap `2^r` for ω / ω* powers.
    pub cap_scale: u64,
    /// Stop enumerating powers once `A·k` and `A·(k+1)` coincide.
    pub early_stop: bool,
    /// Operation memo entries kept before the memo tables are flushed.
    pub memo_limit: Option<usize>,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig { cap_scale: 1, early_stop: true, memo_limit: None }
    }
}

#[derive(Default)]
struct RankTable {
    classes: Vec<Arc<[Triple]>>,
    index: HashMap<Arc<[Triple]>, ClassId>,
    proj: Vec<ClassId>,
    sum: HashMap<(ClassId, ClassId), ClassId>,
    omega: HashMap<ClassId, ClassId>,
    omega_star: HashMap<ClassId, ClassId>,
    zeta: HashMap<ClassId, ClassId>,
    shuffle: HashMap<Vec<ClassId>, ClassId>,
}

impl RankTable {
    fn memo_len(&self) -> usize {
        self.sum.len() + self.omega.len() + self.omega_star.len() + self.zeta.len() + self.shuffle.len()
    }

    fn flush_memo(&mut self) {
        self.sum.clear();
        self.omega.clear();
        self.omega_star.clear();
        self.zeta.clear();
        self.shuffle.clear();
    }
}

/// Interned classes and memoized operations, shared by all queries of one
/// engine.
pub struct Store {
    cfg: AlgebraConfig,
    colors: Vec<ColorSet>,
    color_index: HashMap<ColorSet, ColorId>,
    ranks: Vec<RankTable>,
}

impl Store {
    pub fn new(cfg: AlgebraConfig) -> Self {
        Store { cfg, colors: Vec::new(), color_index: HashMap::new(), ranks: Vec::new() }
    }

    pub fn config(&self) -> AlgebraConfig {
        self.cfg
    }

    pub fn color(&mut self, c: &ColorSet) -> ColorId {
        if let Some(&id) = self.color_index.get(c) {
            return id;
        }
        let id = self.colors.len() as ColorId;
        self.colors.push(c.clone());
        self.color_index.insert(c.clone(), id);
        id
    }

    pub fn color_set(&self, id: ColorId) -> &ColorSet {
        &self.colors[id as usize]
    }

    fn table(&mut self, r: usize) -> &mut RankTable {
        while self.ranks.len() <= r {
            let mut t = RankTable::default();
            if self.ranks.is_empty() {
                // Rank 0 has one class, shared by every order.
                let empty: Arc<[Triple]> = Arc::from(Vec::new());
                t.classes.push(empty.clone());
                t.index.insert(empty, 0);
                t.proj.push(0);
            }
            self.ranks.push(t);
        }
        &mut self.ranks[r]
    }

    /// Number of classes interned at rank `r`.
    pub fn class_count(&self, r: usize) -> usize {
        self.ranks.get(r).map_or(0, |t| t.classes.len())
    }

    pub fn triples(&self, r: usize, x: ClassId) -> Arc<[Triple]> {
        self.ranks[r].classes[x as usize].clone()
    }

    fn intern(&mut self, r: usize, mut triples: Vec<Triple>) -> ClassId {
        if r == 0 {
            return 0;
        }
        triples.sort_unstable();
        triples.dedup();
        if let Some(&id) = self.table(r).index.get(triples.as_slice()) {
            return id;
        }
        let proj = if r == 1 {
            0
        } else {
            let lower: Vec<Triple> = triples
                .iter()
                .map(|t| Triple { left: self.proj(r - 1, t.left), color: t.color, right: self.proj(r - 1, t.right) })
                .collect();
            self.intern(r - 1, lower)
        };
        let table = self.table(r);
        let id = table.classes.len() as ClassId;
        let key: Arc<[Triple]> = Arc::from(triples);
        table.classes.push(key.clone());
        table.index.insert(key, id);
        table.proj.push(proj);
        id
    }

    fn check_memo(&mut self, r: usize) {
        if let Some(limit) = self.cfg.memo_limit {
            let t = self.table(r);
            if t.memo_len() > limit {
                t.flush_memo();
            }
        }
    }

    /// The rank-`(r-1)` class of a rank-`r` class.
    pub fn proj(&self, r: usize, x: ClassId) -> ClassId {
        if r == 0 {
            0
        } else {
            self.ranks[r].proj[x as usize]
        }
    }

    /// Projects a rank-`from` class down to rank `to`.
    pub fn proj_to(&self, from: usize, to: usize, mut x: ClassId) -> ClassId {
        for r in (to + 1..=from).rev() {
            x = self.proj(r, x);
        }
        x
    }

    pub fn empty(&mut self, r: usize) -> ClassId {
        self.intern(r, Vec::new())
    }

    pub fn point(&mut self, r: usize, c: &ColorSet) -> ClassId {
        let color = self.color(c);
        self.point_id(r, color)
    }

    pub fn point_id(&mut self, r: usize, color: ColorId) -> ClassId {
        if r == 0 {
            return 0;
        }
        let e = self.empty(r - 1);
        self.intern(r, vec![Triple { left: e, color, right: e }])
    }

    pub fn sum(&mut self, r: usize, x: ClassId, y: ClassId) -> ClassId {
        if r == 0 {
            return 0;
        }
        let e = self.empty(r);
        if x == e {
            return y;
        }
        if y == e {
            return x;
        }
        if let Some(&z) = self.table(r).sum.get(&(x, y)) {
            return z;
        }
        let px = self.proj(r, x);
        let py = self.proj(r, y);
        let tx = self.triples(r, x);
        let ty = self.triples(r, y);
        let mut out = Vec::with_capacity(tx.len() + ty.len());
        for t in tx.iter() {
            out.push(Triple { left: t.left, color: t.color, right: self.sum(r - 1, t.right, py) });
        }
        for t in ty.iter() {
            out.push(Triple { left: self.sum(r - 1, px, t.left), color: t.color, right: t.right });
        }
        let z = self.intern(r, out);
        self.check_memo(r);
        self.table(r).sum.insert((x, y), z);
        z
    }

    /// Sum of a sequence, combined as a balanced tree.
    pub fn sum_all<I: IntoIterator<Item = ClassId>>(&mut self, r: usize, parts: I) -> ClassId {
        let mut level: Vec<ClassId> = parts.into_iter().collect();
        if level.is_empty() {
            return self.empty(r);
        }
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                next.push(if pair.len() == 2 { self.sum(r, pair[0], pair[1]) } else { pair[0] });
            }
            level = next;
        }
        level[0]
    }

    /// The `k`-fold sum of `x`.
    pub fn power(&mut self, r: usize, x: ClassId, k: u64) -> ClassId {
        let mut acc = self.empty(r);
        for _ in 0..k {
            acc = self.sum(r, acc, x);
        }
        acc
    }

    /// The classes of `x·0, x·1, …` at rank `r`, up to the point where the
    /// sequence stabilizes (or the copy cap when early stopping is off).
    pub fn powers(&mut self, r: usize, x: ClassId, cap: u64) -> Vec<ClassId> {
        let mut out = vec![self.empty(r)];
        let mut k = 0u64;
        loop {
            let cur = *out.last().unwrap();
            let next = self.sum(r, cur, x);
            if self.cfg.early_stop && next == cur {
                break;
            }
            if k >= cap {
                break;
            }
            out.push(next);
            k += 1;
        }
        out
    }

    fn cap(&self, r: usize) -> u64 {
        (1u64 << r.min(62)).saturating_mul(self.cfg.cap_scale)
    }

    pub fn omega(&mut self, r: usize, x: ClassId) -> ClassId {
        if r == 0 {
            return 0;
        }
        if let Some(&z) = self.table(r).omega.get(&x) {
            return z;
        }
        let px = self.proj(r, x);
        let w = self.omega(r - 1, px);
        let cap = self.cap(r);
        let pows = self.powers(r - 1, px, cap);
        let tx = self.triples(r, x);
        let mut out = Vec::new();
        for &p in &pows {
            for t in tx.iter() {
                out.push(Triple { left: self.sum(r - 1, p, t.left), color: t.color, right: self.sum(r - 1, t.right, w) });
            }
        }
        let z = self.intern(r, out);
        self.check_memo(r);
        self.table(r).omega.insert(x, z);
        z
    }

    pub fn omega_star(&mut self, r: usize, x: ClassId) -> ClassId {
        if r == 0 {
            return 0;
        }
        if let Some(&z) = self.table(r).omega_star.get(&x) {
            return z;
        }
        let px = self.proj(r, x);
        let ws = self.omega_star(r - 1, px);
        let cap = self.cap(r);
        let pows = self.powers(r - 1, px, cap);
        let tx = self.triples(r, x);
        let mut out = Vec::new();
        for &p in &pows {
            for t in tx.iter() {
                out.push(Triple { left: self.sum(r - 1, ws, t.left), color: t.color, right: self.sum(r - 1, t.right, p) });
            }
        }
        let z = self.intern(r, out);
        self.check_memo(r);
        self.table(r).omega_star.insert(x, z);
        z
    }

    pub fn zeta(&mut self, r: usize, x: ClassId) -> ClassId {
        if r == 0 {
            return 0;
        }
        if let Some(&z) = self.table(r).zeta.get(&x) {
            return z;
        }
        let px = self.proj(r, x);
        let w = self.omega(r - 1, px);
        let ws = self.omega_star(r - 1, px);
        let tx = self.triples(r, x);
        let mut out = Vec::with_capacity(tx.len());
        for t in tx.iter() {
            out.push(Triple { left: self.sum(r - 1, ws, t.left), color: t.color, right: self.sum(r - 1, t.right, w) });
        }
        let z = self.intern(r, out);
        self.check_memo(r);
        self.table(r).zeta.insert(x, z);
        z
    }

    /// Shuffle of a nonempty set of classes. Classes of the empty order are
    /// ignored; a shuffle of nothing is empty.
    pub fn shuffle(&mut self, r: usize, xs: &[ClassId]) -> ClassId {
        if r == 0 {
            return 0;
        }
        let e = self.empty(r);
        let mut key: Vec<ClassId> = xs.iter().copied().filter(|&x| x != e).collect();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return e;
        }
        if let Some(&z) = self.table(r).shuffle.get(&key) {
            return z;
        }
        let lower: Vec<ClassId> = key.iter().map(|&x| self.proj(r, x)).collect();
        let s = self.shuffle(r - 1, &lower);
        let mut out = Vec::new();
        for &x in &key {
            let tx = self.triples(r, x);
            for t in tx.iter() {
                out.push(Triple { left: self.sum(r - 1, s, t.left), color: t.color, right: self.sum(r - 1, t.right, s) });
            }
        }
        let z = self.intern(r, out);
        self.check_memo(r);
        self.table(r).shuffle.insert(key, z);
        z
    }

    /// The rank-`r` class of a term.
    pub fn class_of(&mut self, t: &Term, r: usize) -> ClassId {
        match t {
            Term::Empty => self.empty(r),
            Term::Pt(c) => self.point(r, c),
            Term::Sum(cs) => {
                let ids: Vec<ClassId> = cs.iter().map(|c| self.class_of(c, r)).collect();
                self.sum_all(r, ids)
            }
            Term::Omega(b) => {
                let x = self.class_of(b, r);
                self.omega(r, x)
            }
            Term::OmegaStar(b) => {
                let x = self.class_of(b, r);
                self.omega_star(r, x)
            }
            Term::Zeta(b) => {
                let x = self.class_of(b, r);
                self.zeta(r, x)
            }
            Term::Shuffle(args) => {
                let ids: Vec<ClassId> = args.iter().map(|a| self.class_of(a, r)).collect();
                self.shuffle(r, &ids)
            }
        }
    }

    /// Checks a class id against the rank table.
    pub fn check(&self, r: usize, x: ClassId) -> Result<()> {
        if (x as usize) < self.class_count(r) {
            Ok(())
        } else {
            Err(CloError::Precondition(format!("unknown class {x} at rank {r}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> Store {
        Store::new(AlgebraConfig::default())
    }

    #[test]
    fn rank_one_sees_colors_only() {
        let mut s = store();
        let a = s.class_of(&Term::fin(1), 1);
        let b = s.class_of(&Term::fin(5), 1);
        let e = s.empty(1);
        assert_eq!(a, b);
        assert_ne!(a, e);
    }

    #[test]
    fn projection_commutes_with_sum() {
        let mut s = store();
        let x = s.class_of(&Term::omega(), 3);
        let y = s.class_of(&Term::eta(), 3);
        let xy = s.sum(3, x, y);
        let (px, py) = (s.proj(3, x), s.proj(3, y));
        let lower = s.sum(2, px, py);
        assert_eq!(s.proj(3, xy), lower);
    }

    #[test]
    fn eta_absorbs_eta() {
        let mut s = store();
        let e = s.class_of(&Term::eta(), 4);
        let ee = s.sum(4, e, e);
        assert_eq!(e, ee);
        let p = s.point(4, &ColorSet::new());
        let epe = s.sum_all(4, [e, p, e]);
        assert_eq!(e, epe);
    }
}
