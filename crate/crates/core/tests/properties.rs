use std::cmp::Ordering;

use clo_core::analysis::{sample, Window};
use clo_core::engine::{check_witness, ef_oracle, finite_expand, AlgebraConfig};
use clo_core::suite::{iso_rewrite, term_strategy};
use clo_core::{canonicalize, compare, parse, ColorSet, Engine, EngineConfig, FiniteOrder, Term};
use proptest::prelude::*;

fn finite_order(max: usize) -> impl Strategy<Value = FiniteOrder> {
    let color = prop_oneof![
        Just(ColorSet::new()),
        Just(ColorSet::from_names(["a"])),
        Just(ColorSet::from_names(["b"])),
        Just(ColorSet::from_names(["a", "b"])),
    ];
    prop::collection::vec(color, 0..=max).prop_map(FiniteOrder::new)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_identity(t in term_strategy()) {
        prop_assert_eq!(parse(&t.to_string()).unwrap(), t.clone());
        prop_assert_eq!(canonicalize(&t), t);
    }

    #[test]
    fn engine_matches_game_search(a in finite_order(7), b in finite_order(7), n in 0usize..=3) {
        let e = Engine::default();
        prop_assert_eq!(e.ef_equiv(&a.to_term(), &b.to_term(), n).unwrap(), ef_oracle(&a, &b, n).unwrap());
    }

    #[test]
    fn finite_terms_expand_back(a in finite_order(8)) {
        prop_assert_eq!(finite_expand(&a.to_term()).unwrap(), a);
    }

    #[test]
    fn rewrites_preserve_every_rank(t in term_strategy(), seed in any::<u64>()) {
        let e = Engine::default();
        prop_assert!(e.ef_equiv(&t, &iso_rewrite(&t, seed), 6).unwrap());
    }

    #[test]
    fn larger_copy_caps_agree(a in term_strategy(), b in term_strategy(), n in 0usize..=3) {
        let wide = Engine::new(EngineConfig {
            algebra: AlgebraConfig { cap_scale: 2, early_stop: false, memo_limit: Some(10_000) },
            ..EngineConfig::default()
        });
        let e = Engine::default();
        prop_assert_eq!(e.ef_equiv(&a, &b, n).unwrap(), wide.ef_equiv(&a, &b, n).unwrap());
    }

    #[test]
    fn sampled_addresses_are_ordered(t in term_strategy()) {
        let set = sample(&t, &Window { omega: 2, zeta: 1, shuffle_rounds: 1, limit: 200 }).unwrap();
        let s = &set.samples;
        for i in 0..s.len() {
            for j in 0..s.len() {
                prop_assert_eq!(compare(&t, &s[i].address, &s[j].address).unwrap(), i.cmp(&j));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn witnesses_replay(a in term_strategy(), b in term_strategy()) {
        let e = Engine::default();
        if let Some(d) = e.distinguishing_rank(&a, &b, 3).unwrap() {
            let st = e.witness(&a, &b, d).unwrap();
            prop_assert!(check_witness(&a, &b, &st).is_ok());
            prop_assert_eq!(st.rank, d);
        }
    }
}

#[test]
fn compare_is_reversed_inside_omega_star() {
    let t = parse("w*(pt[a])").unwrap();
    let set = sample(&t, &Window { omega: 3, zeta: 1, shuffle_rounds: 1, limit: 50 }).unwrap();
    let s = &set.samples;
    assert!(s.len() >= 2);
    assert_eq!(compare(&t, &s[0].address, &s[1].address).unwrap(), Ordering::Less);
}

#[test]
fn equivalence_is_monotone_in_rank_on_a_fixed_chain() {
    let e = Engine::default();
    let terms: Vec<Term> = ["omega", "zeta", "eta", "omega + omega", "w*(pt[]) + eta", "fin(5)"]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect();
    for a in &terms {
        for b in &terms {
            let verdicts: Vec<bool> = (0..=6).map(|n| e.ef_equiv(a, b, n).unwrap()).collect();
            assert!(verdicts.windows(2).all(|w| w[0] || !w[1]), "{a} vs {b}: {verdicts:?}");
        }
    }
}
