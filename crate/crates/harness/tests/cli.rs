//! The `ptrlogic` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ptrlogic::eval::RunMetrics;
use ptrlogic_core::el_reasoner::complete_el;
use ptrlogic_core::logic::ElKb;
use ptrlogic_core::preprocess::EncodedPair;

fn ptrlogic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptrlogic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ptrlogic(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_reason_el_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let kb_path = dir.path().join("kb.elp");
    ok(&["gen", "--seed", "3", "--set", "kb_size=20", "--set", "difficulty=1", "--out", p(&kb_path)]);
    let kb = ElKb::parse(&fs::read_to_string(&kb_path).unwrap()).unwrap();
    assert_eq!(kb.len(), 20);
    let out_path = dir.path().join("inferred.elp");
    ok(&["reason-el", "--in", p(&kb_path), "--out", p(&out_path)]);
    let got = ElKb::parse(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(got.axioms(), complete_el(&kb).unwrap().derived());
    // Same seed, same KB.
    assert_eq!(
        ok(&["gen", "--seed", "3", "--set", "kb_size=20", "--set", "difficulty=1"]),
        fs::read_to_string(&kb_path).unwrap()
    );
}

#[test]
fn reason_rdfs_derives_types() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.nt");
    fs::write(
        &g,
        "<http://ex.org/Cat> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://ex.org/Animal> .\n\
         <http://ex.org/tom> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://ex.org/Cat> .\n",
    )
    .unwrap();
    let out = ok(&["reason-rdfs", "--in", p(&g)]);
    let derived: Vec<&str> = out.lines().collect();
    assert!(
        derived.iter().any(|l| l.contains("ex.org/tom") && l.contains("type") && l.contains("ex.org/Animal")),
        "{out}"
    );
}

#[test]
fn normalize_and_tokenize() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.elp");
    fs::write(&kb, "Cat <= Animal\nAnimal <= EX eats . Food\n").unwrap();
    let norm = ok(&["normalize", "--normalize", "canonical", "--in", p(&kb)]);
    assert_eq!(norm, "a1 <= a2\na2 <= EX a3 . a4\n");
    assert_eq!(ok(&["normalize", "--in", p(&kb)]), fs::read_to_string(&kb).unwrap());

    let text = dir.path().join("t.txt");
    fs::write(&text, "C1 <= C2\n\nC2 <= C3\n").unwrap();
    assert_eq!(ok(&["tokenize", "--in", p(&text)]), "C1 <= C2\nC2 <= C3\n");
    let model = dir.path().join("bpe.txt");
    let bpe = ok(&["tokenize", "--tokenizer", "bpe", "--set", "bpe_budget=30", "--in", p(&text), "--save-model", p(&model)]);
    assert_eq!(bpe.lines().count(), 2);
    assert_eq!(ok(&["tokenize", "--model", p(&model), "--in", p(&text)]), bpe);
}

#[test]
fn errors_are_one_parsable_line() {
    let out = ptrlogic(&["reason-el", "--in", "/definitely/missing.elp"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: kind=io msg="), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "epochs = 2\nbogus = 1\n").unwrap();
    let out = ptrlogic(&["gen", "--config", p(&conf)]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: kind=config msg=config line 2"));

    let bad = dir.path().join("bad.elp");
    fs::write(&bad, "C1 <= \n").unwrap();
    let out = ptrlogic(&["reason-el", "--in", p(&bad)]);
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: kind=parse"));
}

#[test]
fn corpus_train_eval_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        "count = 20\nkb_size = 15\ndifficulty = 1\nhidden_size = 8\nepochs = 2\nbatch_size = 4\nlearning_rate = 0.005\n",
    )
    .unwrap();
    let corpus = dir.path().join("corpus");
    let model = dir.path().join("model");
    let metrics = dir.path().join("metrics.jsonl");
    let c = p(&conf);
    ok(&["corpus", "--config", c, "--seed", "1", "--out", p(&corpus)]);
    for name in ["train.jsonl", "valid.jsonl", "test.jsonl"] {
        assert!(corpus.join(name).exists());
    }
    let encoded = dir.path().join("encoded");
    ok(&["encode", "--config", c, "--corpus", p(&corpus), "--out", p(&encoded)]);
    let first_line = fs::read_to_string(encoded.join("train.jsonl")).unwrap();
    let enc = EncodedPair::from_json_line(first_line.lines().next().unwrap()).unwrap();
    assert_eq!(enc.input_tokens[0], "[EOS]");
    assert_eq!(enc.target_indices.last(), Some(&0));
    assert!(encoded.join("tokenizer.txt").exists());

    let out = ok(&["train", "--config", c, "--seed", "1", "--corpus", p(&corpus), "--model-dir", p(&model), "--metrics", p(&metrics)]);
    let first = RunMetrics::from_json_line(out.lines().next().unwrap()).unwrap();
    assert_eq!(first.pairs, 2);
    assert_eq!(first.loss_curve.len(), 3);
    assert!(out.contains("| run"));

    let test = corpus.join("test.jsonl");
    let eval = ok(&["eval", "--model-dir", p(&model), "--data", p(&test), "--metrics", p(&metrics)]);
    let again = RunMetrics::from_json_line(eval.lines().next().unwrap()).unwrap();
    assert_eq!(again.exact_match, first.exact_match);
    assert_eq!(again.f1, first.f1);

    let table = ok(&["report", "--metrics", p(&metrics)]);
    assert_eq!(table.lines().count(), 4);
    let plot = ok(&["report", "--metrics", p(&metrics), "--plot"]);
    assert!(!plot.is_empty());

    let transfer = ok(&["transfer", "--model-dir", p(&model), "--data", p(&test), "--data", p(&corpus.join("valid.jsonl"))]);
    assert!(transfer.contains("train \\ test"));

    // A second training run with the same seed stores identical parameters.
    let model2 = dir.path().join("model2");
    ok(&["train", "--config", c, "--seed", "1", "--corpus", p(&corpus), "--model-dir", p(&model2)]);
    for f in ["params.ckpt", "vocab.txt", "run.conf", "tokenizer.txt"] {
        assert_eq!(fs::read(model.join(f)).unwrap(), fs::read(model2.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn rdf_corpus_from_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.nt");
    let mut text = String::from(
        "<http://ex.org/Cat> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://ex.org/Animal> .\n",
    );
    for i in 0..10 {
        text.push_str(&format!(
            "<http://ex.org/c{i}> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://ex.org/Cat> .\n"
        ));
    }
    fs::write(&g, text).unwrap();
    let corpus = dir.path().join("rdf");
    ok(&["corpus", "--from-nt", p(&g), "--out", p(&corpus)]);
    let lines: usize = ["train.jsonl", "valid.jsonl", "test.jsonl"]
        .iter()
        .map(|f| fs::read_to_string(corpus.join(f)).unwrap().lines().count())
        .sum();
    assert_eq!(lines, 10);
    assert!(fs::read_to_string(corpus.join("train.jsonl")).unwrap().contains("\"logic\":\"rdf\""));
}
