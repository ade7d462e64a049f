//! Rank-bounded elementary equivalence.

pub mod algebra;
pub mod oracle;
pub mod splits;
pub mod witness;

use std::sync::Mutex;

use serde::Serialize;

use crate::error::{CloError, Result};
use crate::term::{Term, DEFAULT_MAX_DEPTH};

pub use algebra::{AlgebraConfig, ClassId, ColorId, Store, Triple};
pub use oracle::{ef_oracle, finite_expand, FiniteOrder};
pub use splits::{copy_cap, splits, splits_with_cap, SplitTriple};
pub use witness::{check_witness, Refutation, Reply, Side, Strategy};

/// Default rank ceiling.
pub const DEFAULT_MAX_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_rank: usize,
    pub max_depth: usize,
    pub algebra: AlgebraConfig,
    /// Node limit for witness trees.
    pub witness_limit: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_rank: DEFAULT_MAX_RANK,
            max_depth: DEFAULT_MAX_DEPTH,
            algebra: AlgebraConfig::default(),
            witness_limit: 100_000,
        }
    }
}

/// Canonical id of a term's class at one rank, stable within one engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Characteristic {
    pub rank: usize,
    pub class_id: ClassId,
}

/// Decides `≡_n` between terms. Shareable across threads; all queries go
/// through one memo store.
pub struct Engine {
    cfg: EngineConfig,
    store: Mutex<Store>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Self {
        Engine { cfg, store: Mutex::new(Store::new(cfg.algebra)) }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Runs `f` with exclusive access to the memo store.
    pub fn with_store<R>(&self, f: impl FnOnce(&mut Store) -> R) -> R {
        let mut guard = self.store.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    }

    pub fn check_rank(&self, n: usize) -> Result<()> {
        if n > self.cfg.max_rank {
            Err(CloError::Budget(format!("rank {n} exceeds limit {}", self.cfg.max_rank)))
        } else {
            Ok(())
        }
    }

    pub fn check_term(&self, t: &Term) -> Result<()> {
        t.check_depth(self.cfg.max_depth)
    }

    pub fn n_theory(&self, t: &Term, n: usize) -> Result<Characteristic> {
        self.check_rank(n)?;
        self.check_term(t)?;
        let class_id = self.with_store(|s| s.class_of(t, n));
        Ok(Characteristic { rank: n, class_id })
    }

    pub fn ef_equiv(&self, a: &Term, b: &Term, n: usize) -> Result<bool> {
        Ok(self.n_theory(a, n)? == self.n_theory(b, n)?)
    }

    /// Least `n ≤ max` with `a ≢_n b`.
    pub fn distinguishing_rank(&self, a: &Term, b: &Term, max: usize) -> Result<Option<usize>> {
        self.check_rank(max)?;
        self.check_term(a)?;
        self.check_term(b)?;
        Ok(self.with_store(|s| {
            let ca = s.class_of(a, max);
            let cb = s.class_of(b, max);
            if ca == cb {
                return None;
            }
            (0..=max).find(|&n| s.proj_to(max, n, ca) != s.proj_to(max, n, cb))
        }))
    }

    /// Least `n0 ≤ budget` such that the verdict of `a ≡_n b` is the same for
    /// every `n` in `n0..=budget`.
    pub fn stable_from(&self, a: &Term, b: &Term, budget: usize) -> Result<usize> {
        Ok(match self.distinguishing_rank(a, b, budget)? {
            Some(n) => n,
            None => 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn omega_versus_zeta() {
        let e = Engine::default();
        assert!(e.ef_equiv(&t("omega"), &t("zeta"), 1).unwrap());
        assert!(!e.ef_equiv(&t("omega"), &t("zeta"), 2).unwrap());
        assert_eq!(e.distinguishing_rank(&t("omega"), &t("zeta"), 4).unwrap(), Some(2));
        assert_eq!(e.distinguishing_rank(&t("omega"), &t("omega + omega"), 4).unwrap(), Some(3));
        assert_eq!(e.distinguishing_rank(&t("eta"), &t("eta"), 8).unwrap(), None);
    }

    #[test]
    fn chains() {
        let e = Engine::default();
        assert!(e.ef_equiv(&t("fin(3)"), &t("fin(4)"), 2).unwrap());
        assert!(!e.ef_equiv(&t("fin(2)"), &t("fin(3)"), 2).unwrap());
    }

    #[test]
    fn isomorphic_presentations() {
        let e = Engine::default();
        for n in 0..=6 {
            assert!(e.ef_equiv(&t("eta"), &t("eta + pt[] + eta"), n).unwrap());
            assert!(e.ef_equiv(&t("zeta"), &t("zeta + zeta"), n).unwrap());
            assert!(e.ef_equiv(&t("zeta"), &t("w*(pt[]) + w(pt[])"), n).unwrap());
        }
        assert!(e.ef_equiv(&t("sh(pt[a], pt[b])"), &t("sh(pt[b], pt[a])"), 5).unwrap());
    }

    #[test]
    fn empty_is_visible_at_rank_one() {
        let e = Engine::default();
        assert!(e.ef_equiv(&Term::Empty, &Term::point(), 0).unwrap());
        assert!(!e.ef_equiv(&Term::Empty, &Term::point(), 1).unwrap());
    }

    #[test]
    fn rank_budget() {
        let e = Engine::default();
        assert!(matches!(e.n_theory(&t("eta"), 9), Err(CloError::Budget(_))));
    }
}
