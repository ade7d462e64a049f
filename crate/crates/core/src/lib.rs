//! Finitely presented colored linear orders: a term language, a rank-bounded
//! Ehrenfeucht-Fraissé engine, categoricity and structure analysis, a
//! structure-to-order encoder and a catalog of model families.

pub mod analysis;
pub mod categoricity;
pub mod census;
pub mod classify;
pub mod codec;
pub mod engine;
pub mod error;
pub mod parse;
pub mod suite;
pub mod term;

pub use census::{ExampleFamily, FamilyReport, ModelInvariant, TruncatedModel};
pub use classify::{classify, Budgets, Verdict};
pub use codec::{FinStructure, Mixing, ReductionReport, TruncParams};
pub use engine::{Characteristic, Engine, EngineConfig, FiniteOrder, SplitTriple, Strategy};
pub use error::{CloError, Result};
pub use parse::{parse, parse_term_file, print};
pub use term::{canonicalize, colors_of, compare, Address, ColorSet, Step, Term};
