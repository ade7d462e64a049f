//! `clo`: command-line access to the colored linear order toolkit.
//!
//! Exit codes: 0 for a definite answer, 2 when the answer is Unknown within
//! the budgets, 1 on errors, including usage errors.

mod config;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use clo_core::analysis::{condensation_at, convex_types, drop_convex, locate_block, one_types};
use clo_core::categoricity::{count_mn, enumerate_mn, is_categorical, CatVerdict};
use clo_core::census::verify_family;
use clo_core::codec::{encode, verify_reduction};
use clo_core::engine::check_witness;
use clo_core::suite::{run_criterion, CRITERIA};
use clo_core::{
    classify, parse, parse_term_file, Budgets, Engine, ExampleFamily, FinStructure, Mixing, Term, TruncParams,
    Verdict,
};
use serde::Serialize;
use serde_json::{json, Value};

use config::{Config, OutputFormat};

#[derive(Parser)]
#[command(name = "clo", version, about = "Colored linear orders: equivalence games, categoricity, structure analysis")]
struct Cli {
    /// Print the JSON report envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MixingArg {
    Canonical,
    RoundRobin,
    Dense,
}

impl From<MixingArg> for Mixing {
    fn from(m: MixingArg) -> Mixing {
        match m {
            MixingArg::Canonical => Mixing::Canonical,
            MixingArg::RoundRobin => Mixing::RoundRobin,
            MixingArg::Dense => Mixing::Dense,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Zeta,
    Eta,
    Tn,
    Steppoints,
    Fullrationals,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and report its shape.
    Parse { term: String },
    /// Print a term in canonical form.
    Print { term: String },
    /// Decide equivalence at a rank.
    Ef {
        #[arg(long)]
        rank: Option<usize>,
        a: String,
        b: String,
    },
    /// Least rank at which two terms differ.
    RankDistinguish {
        #[arg(long)]
        max: Option<usize>,
        a: String,
        b: String,
    },
    /// A Spoiler strategy for a pair of inequivalent terms.
    Witness {
        #[arg(long)]
        rank: Option<usize>,
        a: String,
        b: String,
    },
    /// Budgeted categoricity check.
    Categorical {
        #[arg(long)]
        rank_budget: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        term: String,
    },
    /// Enumerate the M_n hierarchy.
    EnumM {
        #[arg(long)]
        colors: usize,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Self-additivity at a rank.
    Selfadd {
        #[arg(long)]
        rank: Option<usize>,
        term: String,
    },
    /// Condensation classes at a rank.
    Condense {
        #[arg(long)]
        rank: Option<usize>,
        term: String,
    },
    /// Point classes and convex types at a rank.
    Itypes {
        #[arg(long)]
        rank: Option<usize>,
        term: String,
    },
    /// Complexity classification.
    Classify {
        #[arg(long)]
        rank_budget: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        term: String,
    },
    /// Replace a run of top-level summands.
    Splice {
        /// Rank at which to compare the result with the input.
        #[arg(long)]
        rank: Option<usize>,
        term: String,
        block: String,
        replacement: String,
    },
    /// Delete convex types.
    Drop {
        #[arg(long)]
        rank: Option<usize>,
        /// Comma-separated convex type ids, as listed by `itypes`.
        #[arg(long, value_delimiter = ',', required = true)]
        types: Vec<usize>,
        term: String,
    },
    /// Code a finite structure as an order.
    Encode {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        mix: usize,
        #[arg(long, value_enum, default_value_t = MixingArg::Canonical)]
        mixing: MixingArg,
        structure: PathBuf,
    },
    /// Compare isomorphism of two structures with equivalence of their codes.
    VerifyReduction {
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        mix: usize,
        #[arg(long, value_enum, default_value_t = MixingArg::Canonical)]
        mixing: MixingArg,
        a: PathBuf,
        b: PathBuf,
    },
    /// Generate and check the models of an example family.
    Census {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k0: usize,
        #[arg(long, default_value_t = 2)]
        n0: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        trunc: usize,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Run the acceptance criteria.
    Suite {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<usize>,
    },
}

/// Outcome of one command before rendering.
struct Report {
    inputs: Value,
    result: Value,
    budgets: Value,
    stability: Value,
    text: String,
    unknown: bool,
    failed: bool,
}

impl Report {
    fn new(inputs: Value, result: impl Serialize, text: String) -> anyhow::Result<Report> {
        Ok(Report {
            inputs,
            result: serde_json::to_value(result)?,
            budgets: Value::Null,
            stability: Value::Null,
            text,
            unknown: false,
            failed: false,
        })
    }

    fn budgets(mut self, b: Value) -> Self {
        self.budgets = b;
        self
    }

    fn stability(mut self, s: Value) -> Self {
        self.stability = s;
        self
    }
}

/// Reads a term given inline or as `@path` / `@path#name`.
fn load_term(arg: &str) -> anyhow::Result<Term> {
    let Some(reference) = arg.strip_prefix('@') else {
        return Ok(parse(arg)?);
    };
    let (path, name) = match reference.rsplit_once('#') {
        Some((p, n)) => (p, Some(n)),
        None => (reference, None),
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let entries = parse_term_file(&text)?;
    match name {
        Some(n) => entries
            .into_iter()
            .find(|(k, _)| k == n)
            .map(|(_, t)| t)
            .ok_or_else(|| anyhow!("{path} has no term named {n}")),
        None if entries.len() == 1 => Ok(entries.into_iter().next().unwrap().1),
        None => bail!("{path} holds {} terms; select one with @{path}#name", entries.len()),
    }
}

fn load_structure(path: &Path) -> anyhow::Result<FinStructure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FinStructure::from_json(&text)?)
}

fn rank_json(rank: usize) -> Value {
    json!({ "rank": rank })
}

fn run(cli: &Cli, cfg: &Config) -> anyhow::Result<(String, Report)> {
    let engine = Engine::new(cfg.engine());
    let rank_or = |r: Option<usize>| r.unwrap_or(cfg.rank_budget);
    let (name, report) = match &cli.command {
        Command::Parse { term } => {
            let t = load_term(term)?;
            let result = json!({
                "term": t.to_string(),
                "size": t.size(),
                "depth": t.depth(),
                "colors": clo_core::colors_of(&t).iter().cloned().collect::<Vec<_>>(),
                "finiteLength": t.finite_len(),
            });
            let text = format!("{t}\nsize {} depth {}", t.size(), t.depth());
            ("parse", Report::new(json!({ "term": term }), result, text)?)
        }
        Command::Print { term } => {
            let t = load_term(term)?;
            ("print", Report::new(json!({ "term": term }), t.to_string(), t.to_string())?)
        }
        Command::Ef { rank, a, b } => {
            let n = rank_or(*rank);
            let (ta, tb) = (load_term(a)?, load_term(b)?);
            let equivalent = engine.ef_equiv(&ta, &tb, n)?;
            let dr = engine.distinguishing_rank(&ta, &tb, n)?;
            let result = json!({ "equivalent": equivalent, "rank": n, "distinguishingRank": dr });
            let text = match dr {
                None => format!("equivalent at rank {n}"),
                Some(d) => format!("not equivalent at rank {n} (first differ at rank {d})"),
            };
            let stable = engine.stable_from(&ta, &tb, n)?;
            let r = Report::new(json!({ "a": a, "b": b }), result, text)?
                .budgets(rank_json(n))
                .stability(json!({ "stableFrom": stable }));
            ("ef", r)
        }
        Command::RankDistinguish { max, a, b } => {
            let n = max.unwrap_or(cfg.rank_budget);
            let (ta, tb) = (load_term(a)?, load_term(b)?);
            let dr = engine.distinguishing_rank(&ta, &tb, n)?;
            let text = match dr {
                Some(d) => format!("{d}"),
                None => format!("equivalent up to rank {n}"),
            };
            let r = Report::new(json!({ "a": a, "b": b }), json!({ "distinguishingRank": dr, "max": n }), text)?
                .budgets(json!({ "max": n }));
            ("rank-distinguish", r)
        }
        Command::Witness { rank, a, b } => {
            let n = rank_or(*rank);
            let (ta, tb) = (load_term(a)?, load_term(b)?);
            let r = if engine.ef_equiv(&ta, &tb, n)? {
                Report::new(
                    json!({ "a": a, "b": b }),
                    json!({ "equivalent": true, "rank": n }),
                    format!("equivalent at rank {n}; Spoiler has no winning strategy"),
                )?
            } else {
                let st = engine.witness(&ta, &tb, n)?;
                let checked = check_witness(&ta, &tb, &st).is_ok();
                let text = format!("{}\nreplay check: {}", st.render(), if checked { "ok" } else { "FAILED" });
                let result = json!({ "equivalent": false, "rank": n, "transcript": st, "checked": checked });
                let mut r = Report::new(json!({ "a": a, "b": b }), result, text)?;
                r.failed = !checked;
                r
            };
            ("witness", r.budgets(rank_json(n)))
        }
        Command::Categorical { rank_budget, depth, term } => {
            let (n, d) = (rank_or(*rank_budget), depth.unwrap_or(cfg.depth_budget));
            let t = load_term(term)?;
            let v = is_categorical(&engine, &t, n, d)?;
            let text = match &v {
                CatVerdict::Categorical { via_rank, .. } => format!("categorical (M_{via_rank} derivation)"),
                CatVerdict::CandidateCategorical { witness, at_rank } => {
                    format!("candidate categorical: matches {witness} at rank {at_rank}")
                }
                CatVerdict::NotCategoricalAtBudget { evidence } => format!("not categorical: {evidence}"),
                CatVerdict::Unknown => "unknown within budgets".to_string(),
            };
            let unknown = v == CatVerdict::Unknown;
            let mut r = Report::new(json!({ "term": term }), &v, text)?
                .budgets(json!({ "rank": n, "depth": d }));
            r.unknown = unknown;
            ("categorical", r)
        }
        Command::EnumM { colors, level, count_only } => {
            let count = count_mn(*colors, *level);
            let r = if *count_only {
                let text = count.map_or("overflow".to_string(), |c| c.to_string());
                Report::new(json!({ "colors": colors, "level": level }), json!({ "count": count }), text)?
            } else {
                let members = enumerate_mn(*colors, *level)?;
                let terms: Vec<String> = members.iter().map(|m| m.term.to_string()).collect();
                let text = terms.join("\n");
                Report::new(
                    json!({ "colors": colors, "level": level }),
                    json!({ "count": count, "members": terms }),
                    text,
                )?
            };
            ("enum-m", r)
        }
        Command::Selfadd { rank, term } => {
            let n = rank_or(*rank);
            let t = load_term(term)?;
            let v = clo_core::analysis::self_additive_at(&engine, &t, n)?;
            let r = Report::new(json!({ "term": term }), json!({ "selfAdditive": v }), v.to_string())?
                .budgets(rank_json(n));
            ("selfadd", r)
        }
        Command::Condense { rank, term } => {
            let n = rank_or(*rank);
            let t = load_term(term)?;
            let c = condensation_at(&engine, &t, n)?;
            let mut text = format!("{} classes at rank {n}", c.class_count());
            for (i, class) in c.classes.iter().enumerate() {
                let reps: Vec<String> = class.iter().map(|m| m.address.to_string()).collect();
                text.push_str(&format!("\n  class {i}: {}", reps.join(" ")));
            }
            let stable = c.stable;
            let r = Report::new(json!({ "term": term }), &c, text)?
                .budgets(rank_json(n))
                .stability(json!({ "sameAtPreviousRank": stable }));
            ("condense", r)
        }
        Command::Itypes { rank, term } => {
            let n = rank_or(*rank);
            let t = load_term(term)?;
            let classes = one_types(&engine, &t, n)?;
            let types = convex_types(&engine, &t, n)?;
            let mut text = String::new();
            for c in &classes {
                text.push_str(&format!("class {}: colors {} ({} sampled)\n", c.id, c.colors, c.members.len()));
            }
            for ty in &types.types {
                let kind = if ty.limit { "limit" } else if ty.isolated_at_rank { "isolated" } else { "non-isolated" };
                let desc = ty.descriptor.as_ref().map(|d| format!(" {d}")).unwrap_or_default();
                text.push_str(&format!("type {}: {kind} classes {:?}{desc}\n", ty.id, ty.member_classes));
            }
            text.push_str(&format!("nested families: {}", types.nested_families));
            let r = Report::new(json!({ "term": term }), json!({ "classes": classes, "convexTypes": types }), text)?
                .budgets(rank_json(n));
            ("itypes", r)
        }
        Command::Classify { rank_budget, depth, term } => {
            let budgets = Budgets { rank: rank_or(*rank_budget), depth: depth.unwrap_or(cfg.depth_budget) };
            let t = load_term(term)?;
            let v = classify(&engine, &t, budgets)?;
            let lower = if budgets.rank > 0 {
                Some(classify(&engine, &t, Budgets { rank: budgets.rank - 1, ..budgets })?)
            } else {
                None
            };
            let text = match v.certificate() {
                Some(c) => format!("{}: {c}", v.name()),
                None => v.name().to_string(),
            };
            let result = json!({ "verdict": v.name(), "certificate": v.certificate() });
            let stability = json!({ "sameAtLowerRank": lower.map(|l| l.name() == v.name()) });
            let mut r = Report::new(json!({ "term": term }), result, text)?
                .budgets(serde_json::to_value(budgets)?)
                .stability(stability);
            r.unknown = matches!(v, Verdict::Unknown(_));
            ("classify", r)
        }
        Command::Splice { rank, term, block, replacement } => {
            let n = rank_or(*rank);
            let (t, c, d) = (load_term(term)?, load_term(block)?, load_term(replacement)?);
            let ctx = locate_block(&t, &c).ok_or_else(|| anyhow!("{c} is not a run of top-level summands of {t}"))?;
            let out = clo_core::analysis::splice(&t, ctx, &d)?;
            let blocks_equiv = engine.ef_equiv(&c, &d, n)?;
            let result_equiv = engine.ef_equiv(&t, &out, n)?;
            let result = json!({
                "term": out.to_string(),
                "block": ctx,
                "blocksEquivalent": blocks_equiv,
                "resultEquivalent": result_equiv,
            });
            let text = format!("{out}\nequivalent to input at rank {n}: {result_equiv}");
            let r = Report::new(json!({ "term": term, "block": block, "replacement": replacement }), result, text)?
                .budgets(rank_json(n));
            ("splice", r)
        }
        Command::Drop { rank, types, term } => {
            let n = rank_or(*rank);
            let t = load_term(term)?;
            let ids: BTreeSet<usize> = types.iter().copied().collect();
            let out = drop_convex(&engine, &t, &ids, n)?;
            let r = Report::new(json!({ "term": term, "types": types }), json!({ "term": out.to_string() }), out.to_string())?
                .budgets(rank_json(n));
            ("drop", r)
        }
        Command::Encode { depth, mix, mixing, structure } => {
            let a = load_structure(structure)?;
            let p = TruncParams { depth: *depth, mix: *mix, mixing: (*mixing).into() };
            let code = encode(&a, &p)?;
            let r = Report::new(
                json!({ "structure": structure, "params": p }),
                json!({ "term": code.to_string(), "size": code.size() }),
                code.to_string(),
            )?;
            ("encode", r)
        }
        Command::VerifyReduction { rank, depth, mix, mixing, a, b } => {
            let n = rank_or(*rank);
            let (sa, sb) = (load_structure(a)?, load_structure(b)?);
            let p = TruncParams { depth: *depth, mix: *mix, mixing: (*mixing).into() };
            let rep = verify_reduction(&engine, &sa, &sb, &p, n)?;
            let text = format!(
                "isomorphic {}; codes equivalent at rank {n}: {}; distinguishing rank {:?}; consistent {}; separated {}",
                rep.iso_oracle, rep.codes_equivalent_at_budget, rep.distinguishing_rank, rep.consistent, rep.separated
            );
            let failed = !(rep.consistent && rep.separated);
            let mut r = Report::new(json!({ "a": a, "b": b, "params": p }), &rep, text)?.budgets(rank_json(n));
            r.failed = failed;
            ("verify-reduction", r)
        }
        Command::Census { family, n, k0, n0, depth, trunc, rank } => {
            let r = rank_or(*rank);
            let f = match family {
                FamilyArg::Zeta => ExampleFamily::Zeta,
                FamilyArg::Eta => ExampleFamily::Eta,
                FamilyArg::Tn => ExampleFamily::Tn(*n),
                FamilyArg::Steppoints => ExampleFamily::StepPoints { k0: *k0, n0: *n0 },
                FamilyArg::Fullrationals => ExampleFamily::FullRationals(*depth),
            };
            let rep = verify_family(&engine, f, *trunc, r)?;
            let mut text = format!(
                "{}: {} inequivalent models at rank {r}, expected {}, invariant injective {}, pass {}",
                rep.family,
                rep.model_count,
                rep.expected_class.name(),
                rep.invariant_injective,
                rep.pass
            );
            for (m, inv) in rep.models.iter().zip(&rep.invariants) {
                text.push_str(&format!("\n  {inv:?}: {m}"));
            }
            let report = Report::new(json!({ "family": f, "trunc": trunc }), &rep, text)?.budgets(rank_json(r));
            ("census", report)
        }
        Command::Suite { criterion } => {
            let ids: Vec<usize> =
                if criterion.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { criterion.clone() };
            let results: Vec<_> = ids.iter().map(|&id| run_criterion(&engine, id)).collect();
            let text = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            let failed = results.iter().any(|r| !r.pass);
            let mut r = Report::new(json!({ "criteria": ids }), &results, text)?;
            r.failed = failed;
            ("suite", r)
        }
    };
    Ok((name.to_string(), report))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match Config::load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let json_out = cli.json || cfg.output_format == OutputFormat::Json;
    let start = Instant::now();
    match run(&cli, &cfg) {
        Ok((command, report)) => {
            if json_out {
                let envelope = json!({
                    "command": command,
                    "inputs": report.inputs,
                    "result": report.result,
                    "budgets": report.budgets,
                    "stability": report.stability,
                    "timing_ms": start.elapsed().as_millis() as u64,
                });
                emit(&serde_json::to_string_pretty(&envelope).expect("reports serialize"));
            } else {
                emit(&report.text);
            }
            if report.failed {
                ExitCode::from(1)
            } else if report.unknown {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            if json_out {
                emit(&json!({ "error": format!("{e:#}") }).to_string());
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
