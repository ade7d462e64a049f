//! The hierarchy `M_n`: one-point orders closed under binary sums and
//! shuffles of finite sets, with syntactic rank and budgeted categoricity
//! detection.

use std::collections::HashMap;

use serde::Serialize;

use crate::analysis::noncategorical_certificate;
use crate::engine::{ClassId, Engine};
use crate::error::{CloError, Result};
use crate::term::{colors_of, ColorSet, Term};

/// Largest `k` and `n` accepted by [`enumerate_mn`].
pub const ENUM_MAX_COLORS: usize = 3;
pub const ENUM_MAX_LEVEL: usize = 3;
/// Largest number of members [`enumerate_mn`] will materialize.
pub const ENUM_MEMBER_LIMIT: u128 = 1_000_000;
/// Largest semantic level size for which shuffles of all subsets are formed.
pub const SEMANTIC_SUBSET_LIMIT: usize = 12;

/// How a member of `M_n` is built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Derivation {
    Point(ColorSet),
    Sum(Box<Derivation>, Box<Derivation>),
    Shuffle(Vec<Derivation>),
}

impl Derivation {
    /// Height of the derivation tree; points have height 0.
    pub fn height(&self) -> usize {
        match self {
            Derivation::Point(_) => 0,
            Derivation::Sum(a, b) => 1 + a.height().max(b.height()),
            Derivation::Shuffle(xs) => 1 + xs.iter().map(Derivation::height).max().unwrap_or(0),
        }
    }

    pub fn term(&self) -> Term {
        match self {
            Derivation::Point(c) => Term::Pt(c.clone()),
            Derivation::Sum(a, b) => a.term().plus(&b.term()),
            Derivation::Shuffle(xs) => Term::shuffle(xs.iter().map(Derivation::term)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MnCert {
    pub derivation: Derivation,
    pub level: usize,
}

impl MnCert {
    /// Checks the derivation against the closure rules and against `t`.
    pub fn validates(&self, t: &Term) -> bool {
        valid(&self.derivation) && self.derivation.height() == self.level && &self.derivation.term() == t
    }
}

fn valid(d: &Derivation) -> bool {
    match d {
        Derivation::Point(_) => true,
        Derivation::Sum(a, b) => valid(a) && valid(b),
        Derivation::Shuffle(xs) => !xs.is_empty() && xs.iter().all(valid),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MnMember {
    pub term: Term,
    pub cert: MnCert,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CatVerdict {
    Categorical { cert: MnCert, via_rank: usize },
    CandidateCategorical { witness: Term, at_rank: usize },
    NotCategoricalAtBudget { evidence: String },
    Unknown,
}

/// Least derivation height of `t`, or `None` when `t` has an ω, ω* or ζ
/// node. `Empty` is assigned height 0.
pub fn syntactic_rank(t: &Term) -> Option<usize> {
    syntactic_cert(t).map(|c| c.level).or_else(|| t.is_empty().then_some(0))
}

/// A minimal-height derivation of `t`.
pub fn syntactic_cert(t: &Term) -> Option<MnCert> {
    let derivation = derive(t)?;
    Some(MnCert { level: derivation.height(), derivation })
}

fn derive(t: &Term) -> Option<Derivation> {
    match t {
        Term::Empty | Term::Omega(_) | Term::OmegaStar(_) | Term::Zeta(_) => None,
        Term::Pt(c) => Some(Derivation::Point(c.clone())),
        Term::Shuffle(args) => Some(Derivation::Shuffle(args.iter().map(derive).collect::<Option<_>>()?)),
        Term::Sum(cs) => {
            let leaves: Vec<Derivation> = cs.iter().map(derive).collect::<Option<_>>()?;
            Some(bracket(&leaves))
        }
    }
}

/// Best binary bracketing of a sum, by interval dynamic programming.
fn bracket(leaves: &[Derivation]) -> Derivation {
    let m = leaves.len();
    let mut h = vec![vec![0usize; m]; m];
    let mut split = vec![vec![0usize; m]; m];
    for (i, leaf) in leaves.iter().enumerate() {
        h[i][i] = leaf.height();
    }
    for len in 2..=m {
        for i in 0..=m - len {
            let j = i + len - 1;
            let (best, at) = (i..j)
                .map(|k| (1 + h[i][k].max(h[k + 1][j]), k))
                .min()
                .expect("nonempty range");
            h[i][j] = best;
            split[i][j] = at;
        }
    }
    fn build(leaves: &[Derivation], split: &[Vec<usize>], i: usize, j: usize) -> Derivation {
        if i == j {
            return leaves[i].clone();
        }
        let k = split[i][j];
        Derivation::Sum(Box::new(build(leaves, split, i, k)), Box::new(build(leaves, split, k + 1, j)))
    }
    build(leaves, &split, 0, m - 1)
}

/// The color names used for a `k`-color alphabet.
pub fn alphabet(k: usize) -> Vec<String> {
    ["a", "b", "c"].iter().take(k).map(|s| s.to_string()).collect()
}

fn points(colors: &[String]) -> Vec<Derivation> {
    (0..1u32 << colors.len())
        .map(|mask| {
            Derivation::Point(ColorSet::from_names(
                colors.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| c.clone()),
            ))
        })
        .collect()
}

/// `|M_n|` over `k` colors counted by derivations, `None` on overflow.
pub fn count_mn(k: usize, n: usize) -> Option<u128> {
    let mut m: u128 = 1u128.checked_shl(k as u32)?;
    for _ in 0..n {
        let subsets = if m >= 127 { return None } else { (1u128 << m) - 1 };
        m = m.checked_add(m.checked_mul(m)?)?.checked_add(subsets)?;
    }
    Some(m)
}

/// Every derivation of level at most `n` over a `k`-color alphabet. A
/// member reached twice by different derivations is listed twice, so the
/// length follows `count(n+1) = m + m² + (2^m − 1)`.
pub fn enumerate_mn(k: usize, n: usize) -> Result<Vec<MnMember>> {
    if k > ENUM_MAX_COLORS || n > ENUM_MAX_LEVEL {
        return Err(CloError::Guard(format!(
            "enumeration is limited to k <= {ENUM_MAX_COLORS}, n <= {ENUM_MAX_LEVEL}"
        )));
    }
    match count_mn(k, n) {
        Some(c) if c <= ENUM_MEMBER_LIMIT => {}
        _ => return Err(CloError::Guard(format!("M_{n} over {k} colors has more than {ENUM_MEMBER_LIMIT} members"))),
    }
    let mut level = points(&alphabet(k));
    for _ in 0..n {
        let m = level.len();
        let mut next = level.clone();
        for a in &level {
            for b in &level {
                next.push(Derivation::Sum(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
        for mask in 1u64..(1u64 << m) {
            next.push(Derivation::Shuffle(
                (0..m).filter(|i| mask >> i & 1 == 1).map(|i| level[i].clone()).collect(),
            ));
        }
        level = next;
    }
    Ok(level
        .into_iter()
        .map(|d| MnMember { term: d.term(), cert: MnCert { level: d.height(), derivation: d } })
        .collect())
}

/// Members of `M_depth` over `colors`, one per rank-`rank` class. The second
/// component is false when some level was too large to close under shuffles
/// of all subsets, so the list may be incomplete.
pub fn semantic_mn(engine: &Engine, colors: &ColorSet, depth: usize, rank: usize) -> Result<(Vec<Term>, bool)> {
    let names: Vec<String> = colors.iter().cloned().collect();
    let mut complete = true;
    let mut seen: HashMap<ClassId, Term> = HashMap::new();
    let mut level: Vec<Term> = Vec::new();
    for d in points(&names) {
        let t = d.term();
        let id = engine.n_theory(&t, rank)?.class_id;
        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(id) {
            e.insert(t.clone());
            level.push(t);
        }
    }
    for _ in 0..depth {
        let mut fresh = Vec::new();
        let mut consider = |t: Term, fresh: &mut Vec<Term>| -> Result<()> {
            let id = engine.n_theory(&t, rank)?.class_id;
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(id) {
                e.insert(t.clone());
                fresh.push(t);
            }
            Ok(())
        };
        for a in &level {
            for b in &level {
                consider(a.plus(b), &mut fresh)?;
            }
        }
        if level.len() <= SEMANTIC_SUBSET_LIMIT {
            for mask in 1u64..(1u64 << level.len()) {
                let args = level.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone());
                consider(Term::shuffle(args), &mut fresh)?;
            }
        } else {
            complete = false;
        }
        if fresh.is_empty() {
            break;
        }
        level.extend(fresh);
    }
    Ok((level, complete))
}

/// Budgeted categoricity check.
pub fn is_categorical(engine: &Engine, t: &Term, rank_budget: usize, depth_budget: usize) -> Result<CatVerdict> {
    engine.check_rank(rank_budget)?;
    if let Some(cert) = syntactic_cert(t) {
        if cert.level <= depth_budget {
            return Ok(CatVerdict::Categorical { via_rank: cert.level, cert });
        }
    }
    if t.is_empty() {
        let cert = MnCert { derivation: Derivation::Point(ColorSet::new()), level: 0 };
        return Ok(CatVerdict::Categorical { cert, via_rank: 0 });
    }
    let colors = colors_of(t);
    if colors.len() <= ENUM_MAX_COLORS {
        let target = engine.n_theory(t, rank_budget)?;
        let (members, _) = semantic_mn(engine, &colors, depth_budget, rank_budget)?;
        for b in members {
            if engine.n_theory(&b, rank_budget)? == target {
                return Ok(CatVerdict::CandidateCategorical { witness: b, at_rank: rank_budget });
            }
        }
    }
    if let Some(evidence) = noncategorical_certificate(engine, t, rank_budget)? {
        return Ok(CatVerdict::NotCategoricalAtBudget { evidence });
    }
    Ok(CatVerdict::Unknown)
}
