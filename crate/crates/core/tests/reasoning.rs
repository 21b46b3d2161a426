use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptrlogic_core::el_reasoner::{complete_el, complete_el_naive, is_normal_form};
use ptrlogic_core::generator::{random_el_kb, random_rdf_graph};
use ptrlogic_core::logic::{kb_symbol_table, ElKb, RdfGraph, Statement, Theory};
use ptrlogic_core::rdfs_reasoner::{materialize_rdfs, materialize_rdfs_naive};

const SAMPLE: &str = include_str!("fixtures/sample.elp");
const SAMPLE_INFERRED: &str = include_str!("fixtures/sample_inferred.elp");

#[test]
fn sample_kb_parses() {
    let kb = ElKb::parse(SAMPLE).unwrap();
    assert_eq!(kb.len(), 37);
    assert_eq!(kb.distinct_axioms().len(), 36);
    assert!(is_normal_form(&kb));
    let table = kb_symbol_table(&kb);
    let seeds: Vec<String> = (0..14).map(|i| format!("C{i}")).collect();
    assert_eq!(table[..14], seeds[..]);
}

#[test]
fn sample_completion_matches_table_in_order() {
    let kb = ElKb::parse(SAMPLE).unwrap();
    let expected = ElKb::parse(SAMPLE_INFERRED).unwrap();
    let got = complete_el(&kb).unwrap();
    assert_eq!(got.len(), 27);
    assert_eq!(got.derived(), expected.axioms());
    assert_eq!(complete_el_naive(&kb).unwrap(), got);
}

/// Consistent random renaming of every non-fixed symbol.
fn renaming<T: Theory>(kb: &T, seed: u64) -> HashMap<String, String> {
    let symbols: Vec<String> = kb_symbol_table(kb)
        .into_iter()
        .filter(|s| !T::Stmt::is_fixed_symbol(s))
        .collect();
    let mut images: Vec<usize> = (0..symbols.len()).collect();
    images.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    symbols
        .into_iter()
        .zip(images)
        .map(|(s, i)| (s, format!("N{i}")))
        .collect()
}

fn apply<T: Theory>(kb: &T, map: &HashMap<String, String>) -> T {
    kb.rename_symbols(&mut |s| map.get(s).cloned().unwrap_or_else(|| s.to_string()))
}

fn el(seed: u64, max: usize) -> ElKb {
    random_el_kb(&mut ChaCha8Rng::seed_from_u64(seed), max, 6, 3)
}

fn rdf(seed: u64, max: usize) -> RdfGraph {
    random_rdf_graph(&mut ChaCha8Rng::seed_from_u64(seed), max, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn el_semi_naive_matches_naive(seed in any::<u64>()) {
        let kb = el(seed, 15);
        prop_assert_eq!(complete_el(&kb).unwrap(), complete_el_naive(&kb).unwrap());
    }

    #[test]
    fn el_idempotent(seed in any::<u64>()) {
        let kb = el(seed, 15);
        let c = complete_el(&kb).unwrap();
        let mut all = kb.axioms().to_vec();
        all.extend(c.into_derived());
        prop_assert!(complete_el(&ElKb::new(all)).unwrap().is_empty());
    }

    #[test]
    fn el_monotone(seed in any::<u64>(), cut in 0usize..16) {
        let big = el(seed, 15);
        let small = ElKb::new(big.axioms()[..cut.min(big.len())].to_vec());
        let closure = |kb: &ElKb| -> HashSet<_> {
            let mut s = kb.axiom_set();
            s.extend(complete_el(kb).unwrap().into_derived());
            s
        };
        prop_assert!(closure(&small).is_subset(&closure(&big)));
    }

    #[test]
    fn el_renaming_equivariance(seed in any::<u64>(), sigma in any::<u64>()) {
        let kb = el(seed, 15);
        let map = renaming(&kb, sigma);
        let renamed: Vec<_> = complete_el(&kb)
            .unwrap()
            .derived()
            .iter()
            .map(|a| a.rename_symbols(&mut |s| map[s].clone()))
            .collect();
        prop_assert_eq!(complete_el(&apply(&kb, &map)).unwrap().into_derived(), renamed);
    }

    #[test]
    fn rdfs_semi_naive_matches_naive(seed in any::<u64>()) {
        let g = rdf(seed, 30);
        prop_assert_eq!(materialize_rdfs(&g), materialize_rdfs_naive(&g));
    }

    #[test]
    fn rdfs_idempotent_and_grounded(seed in any::<u64>()) {
        let g = rdf(seed, 30);
        let c = materialize_rdfs(&g);
        let mut terms: HashSet<String> = kb_symbol_table(&g).into_iter().collect();
        terms.insert("rdf:type".into());
        for t in c.derived() {
            for s in t.symbols() {
                prop_assert!(terms.contains(s), "{} not grounded", s);
            }
        }
        let mut all = g.triples().to_vec();
        all.extend(c.into_derived());
        prop_assert!(materialize_rdfs(&RdfGraph::new(all)).is_empty());
    }

    #[test]
    fn rdfs_monotone(seed in any::<u64>(), cut in 0usize..31) {
        let big = rdf(seed, 30);
        let small = RdfGraph::new(big.triples()[..cut.min(big.len())].to_vec());
        let closure = |g: &RdfGraph| -> HashSet<_> {
            let mut s = g.triple_set();
            s.extend(materialize_rdfs(g).into_derived());
            s
        };
        prop_assert!(closure(&small).is_subset(&closure(&big)));
    }

    #[test]
    fn rdfs_renaming_equivariance(seed in any::<u64>(), sigma in any::<u64>()) {
        let g = rdf(seed, 30);
        let map = renaming(&g, sigma);
        let renamed: Vec<_> = materialize_rdfs(&g)
            .derived()
            .iter()
            .map(|t| t.rename_symbols(&mut |s| map[s].clone()))
            .collect();
        prop_assert_eq!(materialize_rdfs(&apply(&g, &map)).into_derived(), renamed);
    }
}
