//! Ordered finite samples of elements of a term's denotation.
//!
//! Every sample carries its exact decomposition `left + {point} + right` and
//! consecutive samples are separated by an exact gap term, so a sample list
//! is a faithful finite picture of where the chosen elements sit.

use crate::error::{CloError, Result};
use crate::term::{shuffle_position, Address, ColorSet, Step, Term};

/// How many copies of each repeated block to visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    /// Copies `0..=omega` of ω-sums and, from the right, of ω*-sums.
    pub omega: u64,
    /// Copies `-zeta..=zeta` of ζ-sums.
    pub zeta: i64,
    /// Integer offsets `0..rounds` at which each shuffle argument is sampled.
    pub shuffle_rounds: i64,
    /// Largest number of samples produced.
    pub limit: usize,
}

impl Window {
    /// A window that visits every orbit needed for rank-`n` classes.
    pub fn covering(cap: u64) -> Self {
        Window { omega: cap, zeta: 0, shuffle_rounds: 1, limit: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub address: Address,
    pub left: Term,
    pub point: ColorSet,
    pub right: Term,
    /// Descriptions of the unbounded families this sample stands for.
    pub families: Vec<String>,
}

/// Samples in increasing order with the gaps between neighbours:
/// `gaps[i]` is the order strictly between `samples[i]` and `samples[i+1]`.
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub gaps: Vec<Term>,
}

impl SampleSet {
    fn wrap(&self, step: impl Fn(&Sample) -> Step, prefix: &Term, suffix: &Term, family: Option<&str>) -> SampleSet {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let mut families = s.families.clone();
                if let Some(f) = family {
                    families.insert(0, f.to_string());
                }
                Sample {
                    address: s.address.prefixed(step(s)),
                    left: prefix.plus(&s.left),
                    point: s.point.clone(),
                    right: s.right.plus(suffix),
                    families,
                }
            })
            .collect();
        SampleSet { samples, gaps: self.gaps.clone() }
    }

    fn append(&mut self, mut other: SampleSet, between: Term) {
        if other.samples.is_empty() {
            return;
        }
        if !self.samples.is_empty() {
            self.gaps.push(between);
        }
        self.samples.append(&mut other.samples);
        self.gaps.append(&mut other.gaps);
    }

    fn first_left(&self) -> Option<&Term> {
        self.samples.first().map(|s| &s.left)
    }

    fn last_right(&self) -> Option<&Term> {
        self.samples.last().map(|s| &s.right)
    }
}

/// Samples `t` through the given window.
pub fn sample(t: &Term, w: &Window) -> Result<SampleSet> {
    let out = go(t, w)?;
    Ok(out)
}

fn guard(set: &SampleSet, w: &Window) -> Result<()> {
    if set.samples.len() > w.limit {
        Err(CloError::Guard(format!("more than {} samples", w.limit)))
    } else {
        Ok(())
    }
}

fn go(t: &Term, w: &Window) -> Result<SampleSet> {
    let out = match t {
        Term::Empty => SampleSet::default(),
        Term::Pt(c) => SampleSet {
            samples: vec![Sample {
                address: Address::root(),
                left: Term::Empty,
                point: c.clone(),
                right: Term::Empty,
                families: Vec::new(),
            }],
            gaps: Vec::new(),
        },
        Term::Sum(cs) => {
            let mut out = SampleSet::default();
            let mut prev_right: Option<Term> = None;
            for (i, child) in cs.iter().enumerate() {
                let inner = go(child, w)?;
                let prefix = Term::sum(cs[..i].iter().cloned());
                let suffix = Term::sum(cs[i + 1..].iter().cloned());
                let between = match (&prev_right, inner.first_left()) {
                    (Some(r), Some(l)) => r.plus(l),
                    _ => Term::Empty,
                };
                if let Some(r) = inner.last_right() {
                    prev_right = Some(r.clone());
                }
                out.append(inner.wrap(|_| Step::SumIndex(i), &prefix, &suffix, None), between);
                guard(&out, w)?;
            }
            out
        }
        Term::Omega(a) => {
            let inner = go(a, w)?;
            let mut out = SampleSet::default();
            for k in 0..=w.omega {
                let prefix = a.repeat(k as usize);
                let family = (k == w.omega).then(|| format!("w copies k >= {k}"));
                let between = seam(&inner);
                out.append(inner.wrap(|_| Step::OmegaIndex(k), &prefix, t, family.as_deref()), between);
                guard(&out, w)?;
            }
            out
        }
        Term::OmegaStar(a) => {
            let inner = go(a, w)?;
            let mut out = SampleSet::default();
            for k in (0..=w.omega).rev() {
                let suffix = a.repeat(k as usize);
                let family = (k == w.omega).then(|| format!("w* copies k >= {k} from the right"));
                let between = seam(&inner);
                out.append(inner.wrap(|_| Step::OmegaStarIndex(k), t, &suffix, family.as_deref()), between);
                guard(&out, w)?;
            }
            out
        }
        Term::Zeta(a) => {
            let inner = go(a, w)?;
            let ws = Term::omega_star_of((**a).clone());
            let om = Term::omega_of((**a).clone());
            let mut out = SampleSet::default();
            for k in -w.zeta..=w.zeta {
                let between = seam(&inner);
                out.append(inner.wrap(|_| Step::ZetaIndex(k), &ws, &om, Some("every z copy")), between);
                guard(&out, w)?;
            }
            out
        }
        Term::Shuffle(args) => {
            let inners: Vec<SampleSet> = args.iter().map(|a| go(a, w)).collect::<Result<_>>()?;
            let mut slots: Vec<(num_rational::Ratio<i64>, usize)> = Vec::new();
            for r in 0..w.shuffle_rounds.max(1) {
                for i in 0..args.len() {
                    slots.push((shuffle_position(i, r), i));
                }
            }
            slots.sort();
            let mut out = SampleSet::default();
            let mut prev_right: Option<Term> = None;
            for (q, i) in slots {
                let inner = &inners[i];
                let between = match (&prev_right, inner.first_left()) {
                    (Some(r), Some(l)) => Term::sum([r.clone(), t.clone(), l.clone()]),
                    _ => Term::Empty,
                };
                if let Some(r) = inner.last_right() {
                    prev_right = Some(r.clone());
                }
                let family = format!("dense positions of argument {i}");
                let branch = args[i].clone();
                out.append(inner.wrap(|_| Step::ShufflePos(q, branch.clone()), t, t, Some(&family)), between);
                guard(&out, w)?;
            }
            out
        }
    };
    Ok(out)
}

/// Gap between the last sample of one copy and the first of the next.
fn seam(inner: &SampleSet) -> Term {
    match (inner.last_right(), inner.first_left()) {
        (Some(r), Some(l)) => r.plus(l),
        _ => Term::Empty,
    }
}
