//! The five-way complexity classifier.

use serde::Serialize;

use crate::analysis::noncategorical_certificate;
use crate::categoricity::syntactic_rank;
use crate::engine::Engine;
use crate::error::Result;
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub rank: usize,
    pub depth: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { rank: 6, depth: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Categorical,
    FiniteModels(usize),
    RealsLike,
    SetsOfRealsLike,
    BorelComplete(String),
    Unknown(Budgets),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Categorical => "Categorical",
            Verdict::FiniteModels(_) => "FiniteModels",
            Verdict::RealsLike => "RealsLike",
            Verdict::SetsOfRealsLike => "SetsOfRealsLike",
            Verdict::BorelComplete(_) => "BorelComplete",
            Verdict::Unknown(_) => "Unknown",
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn certificate(&self) -> Option<&str> {
        match self {
            Verdict::BorelComplete(c) => Some(c),
            _ => None,
        }
    }
}

/// Classifies `th(t)` within the given budgets. Only [`Verdict::Categorical`],
/// [`Verdict::BorelComplete`] and [`Verdict::Unknown`] arise for terms; the
/// remaining classes are reserved for the catalog families.
pub fn classify(engine: &Engine, t: &Term, budgets: Budgets) -> Result<Verdict> {
    engine.check_rank(budgets.rank)?;
    engine.check_term(t)?;
    if t.is_degenerate() {
        return Ok(Verdict::Categorical);
    }
    if syntactic_rank(t).is_some_and(|r| r <= budgets.depth) {
        return Ok(Verdict::Categorical);
    }
    if let Some(cert) = noncategorical_certificate(engine, t, budgets.rank)? {
        return Ok(Verdict::BorelComplete(cert));
    }
    Ok(Verdict::Unknown(budgets))
}
