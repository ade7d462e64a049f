//! Worked examples, each checked against an independent computation where
//! one exists.

use std::collections::BTreeSet;

use clo_core::analysis::{
    condensation_at, convex_types, definable_convex_sets, one_types, self_additive_at,
};
use clo_core::categoricity::{enumerate_mn, is_categorical, syntactic_rank, CatVerdict};
use clo_core::census::{generate_models, invariant, tn_model, verify_family, ModelInvariant, TnTail};
use clo_core::codec::{encode, j_block, verify_reduction, FinStructure, Mixing, Relation, TruncParams};
use clo_core::engine::{check_witness, ef_oracle, finite_expand, splits};
use clo_core::{classify, parse, Budgets, ColorSet, Engine, ExampleFamily, Term, Verdict};

fn t(s: &str) -> Term {
    parse(s).unwrap()
}

#[test]
fn grammar() {
    assert_eq!(t("sh(pt[])"), Term::Shuffle(vec![Term::point()]));
    assert_eq!(t("z(pt[])"), Term::Zeta(Box::new(Term::point())));
    assert_eq!(
        t("pt[a] + pt[a] + sh(pt[a],pt[b])"),
        Term::Sum(vec![Term::pt(["a"]), Term::pt(["a"]), Term::Shuffle(vec![Term::pt(["a"]), Term::pt(["b"])])])
    );
    assert_eq!(t("(pt[] + pt[]) + pt[]"), Term::fin(3));
    assert_eq!(t("sh(pt[a], pt[b], pt[a])"), t("sh(pt[a], pt[b])"));
    assert_eq!(t("empty + pt[]"), Term::point());
}

#[test]
fn splits_of_omega() {
    let s = splits(&Term::omega(), 2);
    assert_eq!(s.len(), 5);
    for k in 0..=4 {
        assert!(s.iter().any(|x| x.left == Term::fin(k) && x.point.is_empty() && x.right == Term::omega()));
    }
}

#[test]
fn distinguishing_ranks() {
    let e = Engine::default();
    assert_eq!(e.distinguishing_rank(&t("omega"), &t("zeta"), 4).unwrap(), Some(2));
    assert_eq!(e.distinguishing_rank(&t("omega"), &t("omega + omega"), 4).unwrap(), Some(3));
    assert_eq!(e.distinguishing_rank(&t("eta"), &t("eta"), 8).unwrap(), None);
}

#[test]
fn witnesses() {
    let e = Engine::default();
    for (a, b, n) in [("omega", "zeta", 2), ("pt[a]", "pt[b]", 1), ("fin(2)", "fin(3)", 2)] {
        let (a, b) = (t(a), t(b));
        let st = e.witness(&a, &b, n).unwrap();
        assert_eq!(st.rank, n);
        assert!(check_witness(&a, &b, &st).is_ok());
    }
    assert!(e.witness(&t("fin(3)"), &t("fin(4)"), 2).is_err());
}

#[test]
fn finite_game_search() {
    let fin = |k| finite_expand(&Term::fin(k)).unwrap();
    assert_eq!(fin(3).coloring, vec![ColorSet::new(); 3]);
    assert_eq!(finite_expand(&t("pt[a] + pt[b]")).unwrap().coloring.len(), 2);
    assert_eq!(finite_expand(&Term::Empty).unwrap().size, 0);
    assert!(ef_oracle(&fin(3), &fin(4), 2).unwrap());
    assert!(ef_oracle(&fin(1), &fin(2), 1).unwrap());
    assert!(!ef_oracle(&fin(1), &fin(2), 2).unwrap());
    let a = finite_expand(&t("pt[a]")).unwrap();
    let b = finite_expand(&t("pt[b]")).unwrap();
    assert!(!ef_oracle(&a, &b, 1).unwrap());
}

#[test]
fn categoricity_examples() {
    assert_eq!(syntactic_rank(&t("pt[a]")), Some(0));
    assert_eq!(syntactic_rank(&t("eta")), Some(1));
    assert_eq!(syntactic_rank(&t("zeta")), None);
    let names = |k, n| -> Vec<String> { enumerate_mn(k, n).unwrap().iter().map(|m| m.term.to_string()).collect() };
    assert_eq!(names(0, 0), vec!["pt[]"]);
    assert_eq!(names(0, 1), vec!["pt[]", "pt[] + pt[]", "sh(pt[])"]);
    assert_eq!(names(1, 0), vec!["pt[]", "pt[a]"]);

    let e = Engine::default();
    assert!(matches!(is_categorical(&e, &t("eta"), 6, 3).unwrap(), CatVerdict::Categorical { via_rank: 1, .. }));
    assert!(matches!(is_categorical(&e, &t("zeta"), 6, 3).unwrap(), CatVerdict::NotCategoricalAtBudget { .. }));
    assert!(matches!(is_categorical(&e, &t("w(pt[a])"), 6, 3).unwrap(), CatVerdict::NotCategoricalAtBudget { .. }));
}

#[test]
fn point_classes_and_definable_sets() {
    let e = Engine::default();
    for n in 1..=4 {
        assert_eq!(one_types(&e, &t("eta"), n).unwrap().len(), 1);
        assert_eq!(one_types(&e, &t("sh(pt[a], pt[b])"), n).unwrap().len(), 2);
        assert_eq!(definable_convex_sets(&e, &t("eta"), n).unwrap().len(), 2);
        assert_eq!(definable_convex_sets(&e, &t("zeta"), n).unwrap().len(), 2);
    }
    assert_eq!(one_types(&e, &t("omega"), 1).unwrap().len(), 2);
    assert_eq!(definable_convex_sets(&e, &t("omega"), 1).unwrap().len(), 4);
}

#[test]
fn self_additivity_examples() {
    let e = Engine::default();
    assert!((1..=6).all(|n| self_additive_at(&e, &t("zeta"), n).unwrap()));
    assert!(!self_additive_at(&e, &t("omega"), 1).unwrap());
    let p = t("pt[] + eta");
    for n in 1..=2 {
        assert!(!self_additive_at(&e, &p, n).unwrap());
    }
    for n in 0..=6 {
        assert!(e.ef_equiv(&p, &p.plus(&p), n).unwrap());
    }
}

#[test]
fn condensation_examples() {
    let e = Engine::default();
    for n in 2..=4 {
        assert_eq!(condensation_at(&e, &t("zeta"), n).unwrap().class_count(), 1);
        assert!(condensation_at(&e, &t("eta"), n).unwrap().classes.iter().all(|c| c.len() == 1));
    }
    let c = condensation_at(&e, &t("z(pt[]) + z(pt[])"), 2).unwrap();
    assert_eq!(c.class_count(), 2);
    assert!(c.stable);
}

#[test]
fn convex_type_examples() {
    let e = Engine::default();
    let eta = convex_types(&e, &t("eta"), 3).unwrap();
    assert_eq!(eta.types.len(), 1);
    assert!(eta.types[0].isolated_at_rank);

    let omega = convex_types(&e, &t("omega"), 2).unwrap();
    let limits: Vec<_> = omega.types.iter().filter(|ty| ty.limit).collect();
    assert_eq!(limits.len(), 1);
    assert_eq!(limits[0].descriptor, Some(t("z(pt[])")));
    assert!(omega.types.iter().filter(|ty| !ty.limit).all(|ty| ty.isolated_at_rank));

    let mixed = convex_types(&e, &t("sh(pt[a], pt[b])"), 3).unwrap();
    assert_eq!(mixed.types.len(), 1);
    assert_eq!(mixed.types[0].member_classes.len(), 2);
}

#[test]
fn classification_examples() {
    let e = Engine::default();
    let b = Budgets::default();
    assert_eq!(classify(&e, &t("eta"), b).unwrap(), Verdict::Categorical);
    let z = classify(&e, &t("zeta"), b).unwrap();
    assert!(z.certificate().unwrap().contains("unique ∼-class"));
    let w = classify(&e, &t("omega"), b).unwrap();
    assert!(w.certificate().unwrap().contains("ω-tail"));
    assert!(classify(&e, &t("sh(pt[a],pt[b],pt[c])"), Budgets { rank: 2, depth: 0 }).unwrap().is_unknown());
}

fn binary(u: usize, tuples: &[[usize; 2]]) -> FinStructure {
    FinStructure {
        universe: u,
        relations: vec![Relation { name: "R".into(), arity: 2, tuples: tuples.iter().map(|t| t.to_vec()).collect() }],
    }
}

#[test]
fn codec_examples() {
    assert_eq!(j_block(0), t("eta + fin(2) + eta"));
    assert_eq!(j_block(3), t("eta + fin(5) + eta"));
    let e = Engine::default();
    let empty = binary(2, &[]);
    let total = binary(2, &[[0, 0], [0, 1], [1, 0], [1, 1]]);
    for mixing in [Mixing::Canonical, Mixing::RoundRobin] {
        let p = TruncParams { depth: 2, mix: 2, mixing };
        let r = verify_reduction(&e, &empty, &total, &p, 6).unwrap();
        assert!(!r.iso_oracle);
        assert!(r.distinguishing_rank.is_some_and(|d| d <= 6));
        let same = verify_reduction(&e, &total, &total, &p, 6).unwrap();
        assert!(same.iso_oracle && same.codes_equivalent_at_budget && same.consistent && same.separated);
    }
}

#[test]
fn codec_mixing_modes() {
    // Round-robin interleaving follows label order, so relabeling can change
    // the code; the canonical order cannot.
    let a = binary(2, &[[0, 0]]);
    let b = binary(2, &[[1, 1]]);
    let rr = TruncParams { depth: 2, mix: 2, mixing: Mixing::RoundRobin };
    let canon = TruncParams { mixing: Mixing::Canonical, ..rr };
    assert_ne!(encode(&a, &rr).unwrap(), encode(&b, &rr).unwrap());
    assert_eq!(encode(&a, &canon).unwrap(), encode(&b, &canon).unwrap());
    // Dense mixing forgets multiplicities.
    let dense = TruncParams { mixing: Mixing::Dense, ..rr };
    let e = Engine::default();
    let two = encode(&binary(2, &[]), &dense).unwrap();
    let three = encode(&binary(3, &[]), &dense).unwrap();
    assert!(e.ef_equiv(&two, &three, 6).unwrap());
}

#[test]
fn census_examples() {
    assert_eq!(generate_models(ExampleFamily::Tn(3), 4).unwrap().len(), 3);
    assert_eq!(generate_models(ExampleFamily::Zeta, 0).unwrap()[0].term, t("zeta"));
    let steps = generate_models(ExampleFamily::StepPoints { k0: 1, n0: 3 }, 0).unwrap();
    assert_eq!(steps.len(), 2);

    let e = Engine::default();
    let inv = |tail| invariant(&e, ExampleFamily::Tn(4), &tn_model(4, 4, tail), 6).unwrap();
    assert_eq!(inv(TnTail::Gap), ModelInvariant::LimitProfile("gap".into()));
    assert_eq!(inv(TnTail::Sup(1)), ModelInvariant::LimitProfile("p1".into()));
    let z = &generate_models(ExampleFamily::Zeta, 0).unwrap()[0];
    assert_eq!(invariant(&e, ExampleFamily::Zeta, z, 4).unwrap(), ModelInvariant::Trivial);

    let r = verify_family(&e, ExampleFamily::Tn(5), 6, 5).unwrap();
    assert_eq!((r.model_count, r.pass), (5, true));
    assert_eq!(r.expected_class, Verdict::FiniteModels(5));
    let r = verify_family(&e, ExampleFamily::Eta, 0, 4).unwrap();
    assert_eq!((r.model_count, r.expected_class), (1, Verdict::Categorical));
    let r = verify_family(&e, ExampleFamily::StepPoints { k0: 1, n0: 3 }, 0, 5).unwrap();
    assert!(r.invariant_injective);
    assert_eq!(r.expected_class, Verdict::RealsLike);
    let cuts: BTreeSet<_> = r.invariants.iter().collect();
    assert_eq!(cuts.len(), 2);
}
