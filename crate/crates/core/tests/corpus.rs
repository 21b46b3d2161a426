use std::collections::HashSet;

use ptrlogic_core::corpus::{build_corpus, build_corpus_with_meta, PairMeta};
use ptrlogic_core::el_reasoner::{complete_el, el_rule_instances, is_normal_form, RuleId};
use ptrlogic_core::generator::{gen_el_kb, gen_el_kb_detailed, split_rdf_per_resource, GenConfig};
use ptrlogic_core::logic::{ElKb, RdfGraph, Statement, Triple};
use ptrlogic_core::rdfs_reasoner::materialize_rdfs;

fn cfg(kb_size: usize, difficulty: usize, seed: u64) -> GenConfig {
    GenConfig {
        kb_size,
        difficulty,
        rng_seed: seed,
        ..GenConfig::default()
    }
}

#[test]
fn paper_sizes_at_moderate_difficulty() {
    for size in [40, 50, 120] {
        for seed in 0..20 {
            let kb = gen_el_kb(&cfg(size, 2, seed)).unwrap();
            assert_eq!(kb.len(), size);
            assert!(is_normal_form(&kb));
            assert!(!complete_el(&kb).unwrap().is_empty());
        }
    }
}

#[test]
fn every_rule_fires_in_every_iteration() {
    for (difficulty, size) in [(1, 15), (1, 40), (2, 50), (3, 120)] {
        for seed in 0..10 {
            let g = gen_el_kb_detailed(&cfg(size, difficulty, seed)).unwrap();
            let mut closure = g.kb.axioms().to_vec();
            closure.extend(complete_el(&g.kb).unwrap().into_derived());
            let closure = ElKb::new(closure);
            for (k, it) in g.chain.iter().enumerate() {
                let own: HashSet<_> = it.axioms.iter().collect();
                for rule in RuleId::ALL {
                    let fired = el_rule_instances(&closure, rule)
                        .unwrap()
                        .iter()
                        .any(|i| i.premises.iter().any(|p| own.contains(p)));
                    assert!(fired, "rule {rule} idle in iteration {k} (seed {seed})");
                }
            }
        }
    }
}

#[test]
fn chain_depth_grows_with_difficulty() {
    // The seed reaches the head of every later iteration.
    for difficulty in 1..=4 {
        let size = GenConfig::minimum_size(difficulty);
        let g = gen_el_kb_detailed(&cfg(size, difficulty, 11)).unwrap();
        let derived = complete_el(&g.kb).unwrap().as_set();
        for it in &g.chain[1..] {
            let target = ptrlogic_core::logic::ElAxiom::sub(&g.seed_concept, &it.concepts[0]);
            assert!(derived.contains(&target));
        }
    }
}

#[test]
fn filler_touches_chain_only_at_seed() {
    for seed in 0..30 {
        let g = gen_el_kb_detailed(&cfg(60, 2, seed)).unwrap();
        let chain: HashSet<String> = g
            .chain
            .iter()
            .flat_map(|it| it.axioms.iter().flat_map(|a| a.symbols()).map(str::to_string))
            .collect();
        let filler: HashSet<String> = g
            .filler
            .iter()
            .flat_map(|a| a.symbols())
            .map(str::to_string)
            .collect();
        let shared: Vec<_> = chain.intersection(&filler).collect();
        assert!(shared.iter().all(|s| **s == g.seed_concept), "{shared:?}");
        assert!(g.filler.first().is_none_or(|a| a.symbols().contains(&g.seed_concept.as_str())));
    }
}

#[test]
fn corpus_is_a_partition_and_re_evaluates() {
    let kbs: Vec<(ElKb, PairMeta)> = (0..25)
        .map(|s| {
            let c = cfg(20, 1, s);
            let meta = PairMeta {
                gen_seed: Some(s),
                config_hash: Some(c.config_hash()),
                ..PairMeta::default()
            };
            (gen_el_kb(&c).unwrap(), meta)
        })
        .collect();
    let split = build_corpus_with_meta(kbs.clone(), complete_el, 9).unwrap();
    assert_eq!((split.train.len(), split.valid.len(), split.test.len()), (20, 3, 2));
    let mut ids: Vec<usize> = split.all().map(|p| p.id).collect();
    ids.sort();
    assert_eq!(ids, (0..25).collect::<Vec<_>>());
    for p in split.all() {
        assert_eq!(p.kb, kbs[p.id].0);
        assert_eq!(p.completion, complete_el(&p.kb).unwrap());
        assert_eq!(p.meta.gen_seed, Some(p.id as u64));
        assert_eq!(p.meta.split_seed, 9);
    }
}

#[test]
fn per_resource_split_lets_domain_rule_fire() {
    let g = RdfGraph::parse(
        "<r1> <p> <o> .\n<p> <rdfs:domain> <d> .\n<r2> <q> <r1> .\n<q> <rdfs:range> <k> .\n",
    )
    .unwrap();
    let parts = split_rdf_per_resource(&g);
    assert_eq!(parts.len(), 2);
    let non_schema: Vec<Triple> = parts
        .iter()
        .flat_map(|p| p.triples().iter().filter(|t| !t.p.as_str().starts_with("rdfs:")).cloned())
        .collect();
    assert_eq!(non_schema.len(), 2);
    assert!(materialize_rdfs(&parts[0])
        .as_set()
        .contains(&Triple::from_strs("r1", "rdf:type", "d")));
    assert!(materialize_rdfs(&parts[1])
        .as_set()
        .contains(&Triple::from_strs("r1", "rdf:type", "k")));
}

#[test]
fn rdf_corpus_builds() {
    let g = RdfGraph::parse(
        "<a> <p> <b> .\n<b> <p> <c> .\n<c> <p> <a> .\n<p> <rdfs:domain> <k> .\n",
    )
    .unwrap();
    let parts = split_rdf_per_resource(&g);
    let split = build_corpus(parts, |g| Ok::<_, std::convert::Infallible>(materialize_rdfs(g)), 1).unwrap();
    assert_eq!(split.len(), 3);
    assert!(split.all().all(|p| p.completion.len() == 1));
}
