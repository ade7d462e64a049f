//! Coding finite relational structures as colored linear orders.
//!
//! Each tuple `x` of universe elements, up to length `d`, gets a block
//! `J_x = η + (2 + k(otp(x))) + η`, where `k` numbers complete atomic types
//! band by band. The blocks are laid out along a finite tree order in which
//! each node is followed by the blocks of its one-element extensions,
//! repeated `m` times round-robin.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::{CloError, Result};
use crate::term::Term;

/// Largest tuple length for which atomic types are enumerated.
pub const MAX_TYPE_ARITY: usize = 3;
/// Largest number of index nodes.
pub const INDEX_NODE_LIMIT: usize = 4096;
/// Largest universe accepted by the isomorphism oracle.
pub const ISO_ORACLE_LIMIT: usize = 4;
/// Largest number of block-tuple facts in one atomic type.
const MAX_FACT_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A finite relational structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinStructure {
    pub universe: usize,
    pub relations: Vec<Relation>,
}

pub type Language = Vec<(String, usize)>;

impl FinStructure {
    pub fn language(&self) -> Language {
        self.relations.iter().map(|r| (r.name.clone(), r.arity)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.relations {
            for t in &r.tuples {
                if t.len() != r.arity {
                    return Err(CloError::InvalidStructure(format!("tuple {t:?} of {} has wrong arity", r.name)));
                }
                if t.iter().any(|&v| v >= self.universe) {
                    return Err(CloError::InvalidStructure(format!("tuple {t:?} of {} leaves the universe", r.name)));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: FinStructure =
            serde_json::from_str(text).map_err(|e| CloError::InvalidStructure(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Canonical JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structures serialize")
    }

    /// The image of the structure under the permutation `pi` of its universe.
    pub fn permuted(&self, pi: &[usize]) -> FinStructure {
        FinStructure {
            universe: self.universe,
            relations: self
                .relations
                .iter()
                .map(|r| Relation {
                    name: r.name.clone(),
                    arity: r.arity,
                    tuples: r.tuples.iter().map(|t| t.iter().map(|&v| pi[v]).collect()).collect(),
                })
                .collect(),
        }
    }
}

/// A complete atomic type of an `n`-tuple: which coordinates are equal, as
/// a restricted growth string, and which relations hold on each tuple of
/// equality blocks, as a bit vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AtomicType {
    pub pattern: Vec<u8>,
    pub facts: u64,
}

impl AtomicType {
    pub fn arity(&self) -> usize {
        self.pattern.len()
    }

    pub fn blocks(&self) -> usize {
        self.pattern.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
    }
}

fn fact_bits(language: &Language, blocks: usize) -> usize {
    language.iter().map(|(_, a)| blocks.pow(*a as u32)).sum()
}

fn growth_strings(n: usize) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().map(|&b| b + 1).max().unwrap_or(0);
        for b in 0..=next {
            prefix.push(b);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// All complete atomic types of `n`-tuples, in canonical order.
pub fn atomic_types(language: &Language, n: usize) -> Result<Vec<AtomicType>> {
    if n > MAX_TYPE_ARITY {
        return Err(CloError::Guard(format!("atomic types are enumerated up to arity {MAX_TYPE_ARITY}")));
    }
    let mut out = Vec::new();
    for pattern in growth_strings(n) {
        let blocks = pattern.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        let bits = fact_bits(language, blocks);
        if bits > MAX_FACT_BITS {
            return Err(CloError::Guard(format!("{bits} atomic facts exceed the limit of {MAX_FACT_BITS}")));
        }
        for facts in 0..1u64 << bits {
            out.push(AtomicType { pattern: pattern.clone(), facts });
        }
    }
    Ok(out)
}

/// Band layout of type numbers: types of arity `n` get numbers in
/// `e[n]..e[n+1]`.
#[derive(Debug, Clone, Serialize)]
pub struct TypeIndexing {
    pub e: Vec<usize>,
    #[serde(skip)]
    k: HashMap<AtomicType, usize>,
}

impl TypeIndexing {
    pub fn k(&self, p: &AtomicType) -> Option<usize> {
        self.k.get(p).copied()
    }

    pub fn max_arity(&self) -> usize {
        self.e.len() - 2
    }
}

pub fn type_indexing(language: &Language, max_n: usize) -> Result<TypeIndexing> {
    let mut e = vec![0];
    let mut k = HashMap::new();
    for n in 0..=max_n {
        let band = atomic_types(language, n)?;
        let base = *e.last().unwrap();
        for (i, p) in band.into_iter().enumerate() {
            k.insert(p, base + i);
        }
        e.push(k.len());
    }
    Ok(TypeIndexing { e, k })
}

/// The atomic type of `tuple` in `a`.
pub fn otp(a: &FinStructure, tuple: &[usize]) -> Result<AtomicType> {
    if let Some(&v) = tuple.iter().find(|&&v| v >= a.universe) {
        return Err(CloError::InvalidStructure(format!("element {v} is outside a universe of size {}", a.universe)));
    }
    let mut reps: Vec<usize> = Vec::new();
    let pattern: Vec<u8> = tuple
        .iter()
        .map(|&v| match reps.iter().position(|&r| r == v) {
            Some(i) => i as u8,
            None => {
                reps.push(v);
                (reps.len() - 1) as u8
            }
        })
        .collect();
    let blocks = reps.len();
    let mut facts = 0u64;
    let mut bit = 0usize;
    for r in &a.relations {
        let count = blocks.pow(r.arity as u32);
        for code in 0..count {
            let mut c = code;
            let mut t = vec![0usize; r.arity];
            for slot in t.iter_mut().rev() {
                *slot = reps[c % blocks];
                c /= blocks;
            }
            if r.tuples.contains(&t) {
                facts |= 1 << bit;
            }
            bit += 1;
        }
    }
    Ok(AtomicType { pattern, facts })
}

/// `η + (2 + k) + η`.
pub fn j_block(k: usize) -> Term {
    Term::sum([Term::eta(), Term::fin(2 + k), Term::eta()])
}

/// How the extensions of a node are arranged after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mixing {
    /// `m` rounds over the extensions in label order.
    RoundRobin,
    /// `m` rounds over the extensions ordered by their own codes, which
    /// makes the code a function of the isomorphism type.
    Canonical,
    /// One shuffle of the extension codes.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncParams {
    pub depth: usize,
    pub mix: usize,
    pub mixing: Mixing,
}

impl Default for TruncParams {
    fn default() -> Self {
        TruncParams { depth: 2, mix: 4, mixing: Mixing::Canonical }
    }
}

impl TruncParams {
    fn check(&self) -> Result<()> {
        if self.depth == 0 || self.mix == 0 {
            return Err(CloError::Precondition("depth and mix must be at least 1".into()));
        }
        if self.depth > MAX_TYPE_ARITY {
            return Err(CloError::Guard(format!("depth is limited to {MAX_TYPE_ARITY}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexNode {
    pub label: Vec<usize>,
}

fn node_count(u: usize, p: &TruncParams) -> Option<usize> {
    let branch = u.checked_mul(p.mix)?;
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..=p.depth {
        total = total.checked_add(level)?;
        level = level.checked_mul(branch)?;
    }
    Some(total)
}

fn guard_nodes(u: usize, p: &TruncParams) -> Result<()> {
    match node_count(u, p) {
        Some(c) if c <= INDEX_NODE_LIMIT => Ok(()),
        _ => Err(CloError::Guard(format!("index order would exceed {INDEX_NODE_LIMIT} nodes"))),
    }
}

/// The truncated index order: every node followed by `m` round-robin
/// passes over its extensions, each pass listing full subtrees.
pub fn build_index_order(u: usize, p: &TruncParams) -> Result<Vec<IndexNode>> {
    if u == 0 {
        return Err(CloError::Precondition("universe must be nonempty".into()));
    }
    p.check()?;
    guard_nodes(u, p)?;
    let mut out = Vec::new();
    fn go(label: &mut Vec<usize>, u: usize, p: &TruncParams, out: &mut Vec<IndexNode>) {
        out.push(IndexNode { label: label.clone() });
        if label.len() == p.depth {
            return;
        }
        for _ in 0..p.mix {
            for a in 0..u {
                label.push(a);
                go(label, u, p, out);
                label.pop();
            }
        }
    }
    go(&mut Vec::new(), u, p, &mut out);
    Ok(out)
}

/// The order coding `a`.
pub fn encode(a: &FinStructure, p: &TruncParams) -> Result<Term> {
    a.validate()?;
    if a.universe == 0 {
        return Err(CloError::Precondition("universe must be nonempty".into()));
    }
    p.check()?;
    guard_nodes(a.universe, p)?;
    let idx = type_indexing(&a.language(), p.depth)?;
    code(a, p, &idx, &mut Vec::new())
}

fn code(a: &FinStructure, p: &TruncParams, idx: &TypeIndexing, label: &mut Vec<usize>) -> Result<Term> {
    let k = idx.k(&otp(a, label)?).expect("every type is indexed");
    let head = j_block(k);
    if label.len() == p.depth {
        return Ok(head);
    }
    let mut children = Vec::with_capacity(a.universe);
    for v in 0..a.universe {
        label.push(v);
        children.push(code(a, p, idx, label)?);
        label.pop();
    }
    let tail = match p.mixing {
        Mixing::Dense => Term::shuffle(children),
        Mixing::RoundRobin | Mixing::Canonical => {
            if p.mixing == Mixing::Canonical {
                children.sort();
            }
            Term::sum((0..p.mix).flat_map(|_| children.iter().cloned()))
        }
    };
    Ok(head.plus(&tail))
}

/// Whether `a` and `b` are isomorphic, by trying every bijection.
pub fn isomorphic(a: &FinStructure, b: &FinStructure) -> Result<bool> {
    if a.language() != b.language() || a.universe != b.universe {
        return Ok(false);
    }
    if a.universe > ISO_ORACLE_LIMIT {
        return Err(CloError::Guard(format!("isomorphism search is limited to {ISO_ORACLE_LIMIT} elements")));
    }
    let mut pi: Vec<usize> = (0..a.universe).collect();
    loop {
        if a.permuted(&pi) == *b {
            return Ok(true);
        }
        if !next_permutation(&mut pi) {
            return Ok(false);
        }
    }
}

/// Advances `v` to the next permutation in lexicographic order.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub iso_oracle: bool,
    pub codes_equivalent_at_budget: bool,
    pub distinguishing_rank: Option<usize>,
    /// Isomorphic inputs received equivalent codes.
    pub consistent: bool,
    /// Non-isomorphic inputs received codes told apart within the budget.
    pub separated: bool,
}

pub fn verify_reduction(
    engine: &Engine,
    a: &FinStructure,
    b: &FinStructure,
    p: &TruncParams,
    rank_budget: usize,
) -> Result<ReductionReport> {
    if a.universe > ISO_ORACLE_LIMIT || b.universe > ISO_ORACLE_LIMIT {
        return Err(CloError::Guard(format!("universes are limited to {ISO_ORACLE_LIMIT} elements")));
    }
    if a.language() != b.language() {
        return Err(CloError::InvalidStructure("structures use different languages".into()));
    }
    let iso = isomorphic(a, b)?;
    let (ca, cb) = (encode(a, p)?, encode(b, p)?);
    let dr = engine.distinguishing_rank(&ca, &cb, rank_budget)?;
    Ok(ReductionReport {
        iso_oracle: iso,
        codes_equivalent_at_budget: dr.is_none(),
        distinguishing_rank: dr,
        consistent: !iso || dr.is_none(),
        separated: iso || dr.is_some(),
    })
}

/// One representative of each isomorphism class of structures with a
/// single binary relation `R` on `u` elements.
pub fn binary_structures_up_to_iso(u: usize) -> Result<Vec<FinStructure>> {
    if u > 3 {
        return Err(CloError::Guard("binary structures are enumerated up to 3 elements".into()));
    }
    let pairs: Vec<Vec<usize>> = (0..u).flat_map(|i| (0..u).map(move |j| vec![i, j])).collect();
    let mut seen: BTreeMap<String, FinStructure> = BTreeMap::new();
    for mask in 0u32..1 << pairs.len() {
        let tuples = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
        let s = FinStructure { universe: u, relations: vec![Relation { name: "R".into(), arity: 2, tuples }] };
        let mut pi: Vec<usize> = (0..u).collect();
        let mut best = s.to_json();
        while next_permutation(&mut pi) {
            best = best.min(s.permuted(&pi).to_json());
        }
        seen.entry(best).or_insert(s);
    }
    Ok(seen.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> Language {
        vec![("R".to_string(), 2)]
    }

    fn structure(u: usize, tuples: &[[usize; 2]]) -> FinStructure {
        FinStructure {
            universe: u,
            relations: vec![Relation { name: "R".into(), arity: 2, tuples: tuples.iter().map(|t| t.to_vec()).collect() }],
        }
    }

    #[test]
    fn type_counts() {
        let sizes: Vec<usize> = (0..=3).map(|n| atomic_types(&binary(), n).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 2, 18, 562]);
        assert_eq!(atomic_types(&Vec::new(), 2).unwrap().len(), 2);
        assert!(atomic_types(&binary(), 4).is_err());
    }

    #[test]
    fn bands() {
        let idx = type_indexing(&Vec::new(), 1).unwrap();
        assert_eq!(&idx.e[..2], &[0, 1]);
        let idx = type_indexing(&binary(), 2).unwrap();
        assert_eq!(idx.e, vec![0, 1, 3, 21]);
        let ks: BTreeSet<usize> = atomic_types(&binary(), 1).unwrap().iter().map(|p| idx.k(p).unwrap()).collect();
        assert_eq!(ks, BTreeSet::from([1, 2]));
    }

    #[test]
    fn atomic_type_of_tuples() {
        let refl = structure(1, &[[0, 0]]);
        assert_eq!(otp(&refl, &[0]).unwrap(), AtomicType { pattern: vec![0], facts: 1 });
        let empty = structure(2, &[]);
        assert_eq!(otp(&empty, &[0, 1]).unwrap(), AtomicType { pattern: vec![0, 1], facts: 0 });
        assert_eq!(otp(&empty, &[]).unwrap(), AtomicType { pattern: vec![], facts: 0 });
        assert!(otp(&empty, &[2]).is_err());
    }

    #[test]
    fn index_orders() {
        let p = |d, m| TruncParams { depth: d, mix: m, mixing: Mixing::RoundRobin };
        assert_eq!(build_index_order(1, &p(1, 1)).unwrap().len(), 2);
        let labels: Vec<Vec<usize>> = build_index_order(2, &p(1, 2)).unwrap().into_iter().map(|n| n.label).collect();
        assert_eq!(labels, vec![vec![], vec![0], vec![1], vec![0], vec![1]]);
        assert_eq!(build_index_order(2, &p(2, 1)).unwrap().len(), 7);
        assert!(build_index_order(4, &p(3, 4)).is_err());
    }

    #[test]
    fn single_point_code() {
        let a = FinStructure { universe: 1, relations: Vec::new() };
        let p = TruncParams { depth: 1, mix: 1, mixing: Mixing::RoundRobin };
        assert_eq!(encode(&a, &p).unwrap(), j_block(0).plus(&j_block(1)));
    }

    #[test]
    fn canonical_codes_are_invariant() {
        let a = structure(3, &[[0, 1], [1, 2], [2, 2]]);
        let p = TruncParams { depth: 2, mix: 2, mixing: Mixing::Canonical };
        let code = encode(&a, &p).unwrap();
        let mut pi = vec![0, 1, 2];
        while next_permutation(&mut pi) {
            assert_eq!(encode(&a.permuted(&pi), &p).unwrap(), code);
        }
    }

    #[test]
    fn iso_classes() {
        let counts: Vec<usize> = (1..=3).map(|u| binary_structures_up_to_iso(u).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 10, 104]);
        assert!(isomorphic(&structure(2, &[[0, 1]]), &structure(2, &[[1, 0]])).unwrap());
        assert!(!isomorphic(&structure(2, &[[0, 1]]), &structure(2, &[[0, 0]])).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let a = structure(2, &[[0, 1]]);
        let text = a.to_json();
        assert_eq!(FinStructure::from_json(&text).unwrap(), a);
        assert!(FinStructure::from_json(r#"{"universe":1,"relations":[{"name":"R","arity":2,"tuples":[[0,1]]}]}"#).is_err());
    }
}
