use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptrlogic_core::corpus::{build_corpus, CorpusPair};
use ptrlogic_core::el_reasoner::complete_el;
use ptrlogic_core::generator::{gen_el_kb, random_el_kb, random_rdf_graph, GenConfig};
use ptrlogic_core::logic::{ElKb, RdfGraph, Theory};
use ptrlogic_core::preprocess::normalize::DEFAULT_POOL_SIZE;
use ptrlogic_core::preprocess::{
    bpe_train, decode_pointers, encode_corpus_pair, input_text, normalize, parse_statements,
    statements_text, NormalizeMode, Tokenizer, EncodedPair,
};
use ptrlogic_core::rdfs_reasoner::materialize_rdfs;

fn el_pairs(n: u64) -> Vec<CorpusPair<ElKb>> {
    let kbs = (0..n)
        .map(|s| {
            gen_el_kb(&GenConfig {
                kb_size: 40,
                rng_seed: s,
                ..GenConfig::default()
            })
            .unwrap()
        })
        .collect();
    build_corpus(kbs, complete_el, 0).unwrap().all().cloned().collect()
}

fn round_trips<T: Theory>(pair: &CorpusPair<T>, tok: &Tokenizer) {
    let enc = encode_corpus_pair(pair, tok).unwrap();
    assert!(enc.target_indices.iter().all(|&i| i < enc.input_tokens.len()));
    assert_eq!(*enc.target_indices.last().unwrap(), 0);
    let decoded = decode_pointers(&enc.input_tokens, &enc.target_indices).unwrap();
    let text = tok.detokenize(&decoded);
    assert_eq!(text, statements_text(pair.completion.derived()));
    let back: Vec<T::Stmt> = parse_statements(&text).unwrap();
    assert_eq!(back, pair.completion.derived());
    let line = enc.to_json_line();
    assert!(!line.contains('\n'));
    assert_eq!(EncodedPair::from_json_line(&line).unwrap(), enc);
}

#[test]
fn el_round_trip_whitespace_and_bpe() {
    let pairs = el_pairs(60);
    let corpus: Vec<String> = pairs.iter().map(|p| input_text(&p.kb)).collect();
    let bpe = Tokenizer::Bpe(bpe_train(&corpus, 60).unwrap());
    for p in &pairs {
        round_trips(p, &Tokenizer::Whitespace);
        round_trips(p, &bpe);
    }
}

#[test]
fn rdf_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let graphs: Vec<RdfGraph> = (0..200).map(|_| random_rdf_graph(&mut rng, 30, 6)).collect();
    let split = build_corpus(graphs, |g| Ok::<_, std::convert::Infallible>(materialize_rdfs(g)), 0)
        .unwrap();
    let corpus: Vec<String> = split.all().map(|p| input_text(&p.kb)).collect();
    let bpe = Tokenizer::Bpe(bpe_train(&corpus, 40).unwrap());
    for p in split.all() {
        round_trips(p, &Tokenizer::Whitespace);
        round_trips(p, &bpe);
    }
}

#[test]
fn bpe_is_deterministic() {
    let corpus: Vec<String> = el_pairs(10).iter().map(|p| input_text(&p.kb)).collect();
    assert_eq!(bpe_train(&corpus, 80).unwrap(), bpe_train(&corpus, 80).unwrap());
}

proptest! {
    #[test]
    fn canonical_normalization_is_rename_invariant(seed in any::<u64>(), sigma in any::<u64>()) {
        let kb = random_el_kb(&mut ChaCha8Rng::seed_from_u64(seed), 15, 6, 3);
        let (renamed, _) = normalize(&kb, NormalizeMode::Random, sigma, 1000).unwrap();
        let a = normalize(&kb, NormalizeMode::Canonical, 0, DEFAULT_POOL_SIZE).unwrap().0;
        let b = normalize(&renamed, NormalizeMode::Canonical, 0, DEFAULT_POOL_SIZE).unwrap().0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn normalized_completion_is_renamed_completion(seed in any::<u64>(), sigma in any::<u64>()) {
        let kb = random_el_kb(&mut ChaCha8Rng::seed_from_u64(seed), 15, 6, 3);
        let (n, r) = normalize(&kb, NormalizeMode::Random, sigma, DEFAULT_POOL_SIZE).unwrap();
        prop_assert_eq!(
            complete_el(&n).unwrap(),
            r.apply_completion(&complete_el(&kb).unwrap())
        );
    }

    #[test]
    fn duplicate_positions_decode_alike(seed in any::<u64>()) {
        let kb = random_el_kb(&mut ChaCha8Rng::seed_from_u64(seed), 15, 6, 3);
        let tokens: Vec<String> = input_text(&kb).split_whitespace().map(String::from).collect();
        for (i, t) in tokens.iter().enumerate() {
            let first = tokens.iter().position(|x| x == t).unwrap();
            prop_assert_eq!(
                decode_pointers(&tokens, &[i]).unwrap(),
                decode_pointers(&tokens, &[first]).unwrap()
            );
        }
    }
}
