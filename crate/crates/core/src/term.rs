//! Finite presentations of countable colored linear orders.
//!
//! A [`Term`] denotes an order built from one-point orders by finite sums,
//! ω / ω* / ζ repetition and shuffles. Terms are kept in a canonical form:
//! sums are flat and free of `Empty`, shuffle arguments are a sorted,
//! deduplicated set, and repetition bodies are nonempty.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{CloError, Result};

/// Default bound on the nesting depth of a term.
pub const DEFAULT_MAX_DEPTH: usize = 32;

/// The set of unary predicates holding at a point.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColorSet(pub BTreeSet<String>);

impl ColorSet {
    pub fn new() -> Self {
        ColorSet(BTreeSet::new())
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ColorSet(names.into_iter().map(Into::into).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, c: &str) -> bool {
        self.0.contains(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }

    pub fn union_with(&mut self, other: &ColorSet) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// A finitely presented countable colored linear order.
///
/// The derived `Ord` is the fixed structural order used to sort shuffle
/// arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Empty,
    Pt(ColorSet),
    /// Left-to-right concatenation, at least two children once canonical.
    Sum(Vec<Term>),
    /// `A·ω`
    Omega(Box<Term>),
    /// `A·ω*`
    OmegaStar(Box<Term>),
    /// `A·ζ`
    Zeta(Box<Term>),
    /// `σ(S)`, arguments sorted and deduplicated once canonical.
    Shuffle(Vec<Term>),
}

impl Term {
    pub fn pt<I, S>(colors: I) -> Term
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Term::Pt(ColorSet::from_names(colors))
    }

    /// The uncolored one-point order.
    pub fn point() -> Term {
        Term::Pt(ColorSet::new())
    }

    /// The `n`-element uncolored chain.
    pub fn fin(n: usize) -> Term {
        Term::point().repeat(n)
    }

    pub fn eta() -> Term {
        Term::Shuffle(vec![Term::point()])
    }

    pub fn omega() -> Term {
        Term::Omega(Box::new(Term::point()))
    }

    pub fn omega_star() -> Term {
        Term::OmegaStar(Box::new(Term::point()))
    }

    pub fn zeta() -> Term {
        Term::Zeta(Box::new(Term::point()))
    }

    /// Canonical sum of the given terms.
    pub fn sum<I: IntoIterator<Item = Term>>(parts: I) -> Term {
        let mut flat = Vec::new();
        for p in parts {
            push_flat(&mut flat, p);
        }
        match flat.len() {
            0 => Term::Empty,
            1 => flat.pop().unwrap(),
            _ => Term::Sum(flat),
        }
    }

    /// Canonical shuffle of the given arguments.
    pub fn shuffle<I: IntoIterator<Item = Term>>(args: I) -> Term {
        let mut v: Vec<Term> = args.into_iter().filter(|a| !a.is_empty()).collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            Term::Empty
        } else {
            Term::Shuffle(v)
        }
    }

    pub fn omega_of(body: Term) -> Term {
        if body.is_empty() {
            Term::Empty
        } else {
            Term::Omega(Box::new(body))
        }
    }

    pub fn omega_star_of(body: Term) -> Term {
        if body.is_empty() {
            Term::Empty
        } else {
            Term::OmegaStar(Box::new(body))
        }
    }

    pub fn zeta_of(body: Term) -> Term {
        if body.is_empty() {
            Term::Empty
        } else {
            Term::Zeta(Box::new(body))
        }
    }

    /// `self + other`, canonical when both operands are.
    pub fn plus(&self, other: &Term) -> Term {
        Term::sum([self.clone(), other.clone()])
    }

    /// The `k`-fold sum `A·k`; `A·0` is `Empty`.
    pub fn repeat(&self, k: usize) -> Term {
        Term::sum(std::iter::repeat_n(self.clone(), k))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Term::Empty)
    }

    /// Nesting depth; `Empty` and points have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Empty | Term::Pt(_) => 1,
            Term::Sum(cs) | Term::Shuffle(cs) => 1 + cs.iter().map(Term::depth).max().unwrap_or(0),
            Term::Omega(b) | Term::OmegaStar(b) | Term::Zeta(b) => 1 + b.depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Empty | Term::Pt(_) => 1,
            Term::Sum(cs) | Term::Shuffle(cs) => 1 + cs.iter().map(Term::size).sum::<usize>(),
            Term::Omega(b) | Term::OmegaStar(b) | Term::Zeta(b) => 1 + b.size(),
        }
    }

    /// `Some(n)` when the denoted order is finite with `n` points.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            Term::Empty => Some(0),
            Term::Pt(_) => Some(1),
            Term::Sum(cs) => cs.iter().map(Term::finite_len).sum(),
            Term::Omega(b) | Term::OmegaStar(b) | Term::Zeta(b) => b.is_empty().then_some(0),
            Term::Shuffle(args) => args.iter().all(Term::is_empty).then_some(0),
        }
    }

    /// True when the denoted order has at most one point.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Term::Empty | Term::Pt(_))
    }

    /// True when the term contains an ω, ω* or ζ node.
    pub fn has_repetition(&self) -> bool {
        match self {
            Term::Empty | Term::Pt(_) => false,
            Term::Sum(cs) | Term::Shuffle(cs) => cs.iter().any(Term::has_repetition),
            Term::Omega(_) | Term::OmegaStar(_) | Term::Zeta(_) => true,
        }
    }

    pub fn check_depth(&self, max: usize) -> Result<()> {
        let d = self.depth();
        if d > max {
            Err(CloError::Budget(format!("term depth {d} exceeds limit {max}")))
        } else {
            Ok(())
        }
    }
}

fn push_flat(out: &mut Vec<Term>, t: Term) {
    match t {
        Term::Empty => {}
        Term::Sum(cs) => out.extend(cs),
        other => out.push(other),
    }
}

/// Canonical form of an arbitrary term. Idempotent; preserves the
/// isomorphism type of the denotation.
pub fn canonicalize(t: &Term) -> Term {
    match t {
        Term::Empty => Term::Empty,
        Term::Pt(c) => Term::Pt(c.clone()),
        Term::Sum(cs) => Term::sum(cs.iter().map(canonicalize)),
        Term::Omega(b) => Term::omega_of(canonicalize(b)),
        Term::OmegaStar(b) => Term::omega_star_of(canonicalize(b)),
        Term::Zeta(b) => Term::zeta_of(canonicalize(b)),
        Term::Shuffle(args) => Term::shuffle(args.iter().map(canonicalize)),
    }
}

/// Union of all colors occurring at points of `t`.
pub fn colors_of(t: &Term) -> ColorSet {
    let mut out = ColorSet::new();
    collect_colors(t, &mut out);
    out
}

fn collect_colors(t: &Term, out: &mut ColorSet) {
    match t {
        Term::Empty => {}
        Term::Pt(c) => out.union_with(c),
        Term::Sum(cs) | Term::Shuffle(cs) => cs.iter().for_each(|c| collect_colors(c, out)),
        Term::Omega(b) | Term::OmegaStar(b) | Term::Zeta(b) => collect_colors(b, out),
    }
}

pub type Rational = Ratio<i64>;

/// Which shuffle argument owns the index position `q` when a shuffle has
/// `arity` arguments.
///
/// The index order is realized on the rationals, partitioned by the 2-adic
/// valuation of the reduced denominator modulo `arity`; every class is dense
/// and codense.
pub fn shuffle_class(q: &Rational, arity: usize) -> usize {
    let den = *q.denom();
    (den.trailing_zeros() as usize) % arity
}

/// A canonical position of shuffle argument `i`: `0` for the first argument,
/// `1/2^i` otherwise.
pub fn shuffle_position(i: usize, offset: i64) -> Rational {
    if i == 0 {
        Rational::from_integer(offset)
    } else {
        Rational::from_integer(offset) + Rational::new(1, 1i64 << i)
    }
}

/// One descent step in an [`Address`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    SumIndex(usize),
    OmegaIndex(u64),
    /// Copy index counted from the right end of an ω*-sum.
    OmegaStarIndex(u64),
    ZetaIndex(i64),
    ShufflePos(Rational, Term),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::SumIndex(i) => write!(f, "sum:{i}"),
            Step::OmegaIndex(k) => write!(f, "w:{k}"),
            Step::OmegaStarIndex(k) => write!(f, "w*:{k}"),
            Step::ZetaIndex(k) => write!(f, "z:{k}"),
            Step::ShufflePos(q, b) => write!(f, "sh:{q}@{b}"),
        }
    }
}

/// A concrete element of the order denoted by a term.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Address(pub Vec<Step>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn prefixed(&self, step: Step) -> Address {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(step);
        v.extend(self.0.iter().cloned());
        Address(v)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Address {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Checks that `addr` names a point of `t`.
pub fn validate_address(t: &Term, addr: &Address) -> Result<()> {
    let mut node = t;
    for (depth, step) in addr.0.iter().enumerate() {
        node = descend(node, step).map_err(|msg| {
            CloError::InvalidAddress(format!("step {depth} ({step}): {msg}"))
        })?;
    }
    match node {
        Term::Pt(_) => Ok(()),
        _ => Err(CloError::InvalidAddress("path does not end at a point".into())),
    }
}

fn descend<'a>(node: &'a Term, step: &Step) -> std::result::Result<&'a Term, String> {
    match (node, step) {
        (Term::Sum(cs), Step::SumIndex(i)) => cs.get(*i).ok_or_else(|| format!("index {i} out of range")),
        (Term::Omega(b), Step::OmegaIndex(_)) => Ok(b),
        (Term::OmegaStar(b), Step::OmegaStarIndex(_)) => Ok(b),
        (Term::Zeta(b), Step::ZetaIndex(_)) => Ok(b),
        (Term::Shuffle(args), Step::ShufflePos(q, branch)) => {
            let owner = &args[shuffle_class(q, args.len())];
            if owner == branch {
                Ok(owner)
            } else {
                Err(format!("position {q} belongs to argument {owner}, not {branch}"))
            }
        }
        _ => Err("step does not match node shape".into()),
    }
}

/// Order of the elements named by `x` and `y` in the order denoted by `t`.
pub fn compare(t: &Term, x: &Address, y: &Address) -> Result<Ordering> {
    validate_address(t, x)?;
    validate_address(t, y)?;
    for (a, b) in x.0.iter().zip(y.0.iter()) {
        let ord = match (a, b) {
            (Step::SumIndex(i), Step::SumIndex(j)) => i.cmp(j),
            (Step::OmegaIndex(i), Step::OmegaIndex(j)) => i.cmp(j),
            (Step::OmegaStarIndex(i), Step::OmegaStarIndex(j)) => j.cmp(i),
            (Step::ZetaIndex(i), Step::ZetaIndex(j)) => i.cmp(j),
            (Step::ShufflePos(p, _), Step::ShufflePos(q, _)) => p.cmp(q),
            _ => unreachable!("validated addresses share node shapes"),
        };
        if ord != Ordering::Equal {
            return Ok(ord);
        }
    }
    Ok(Ordering::Equal)
}
