//! End-to-end runs shared by the command line and the tests: corpus files,
//! train-and-evaluate, and cross-corpus evaluation.

use std::fs;
use std::path::Path;

use ptrlogic_core::corpus::{build_corpus, read_jsonl, write_jsonl, CorpusSplit};
use ptrlogic_core::generator::split_rdf_per_resource;
use ptrlogic_core::logic::{Logic, RdfGraph, Theory};
use ptrlogic_core::preprocess::Tokenizer;
use ptrlogic_core::rdfs_reasoner::materialize_rdfs;
use ptrlogic_neural::{Model, Real};

use crate::config::RunConfig;
use crate::data::{encode_pairs, generate_el_corpus, prepare_split, PreparedSplit};
use crate::error::HarnessError;
use crate::store::tokenizer_to_text;
use crate::eval::{evaluate_exact_match, RunMetrics};
use crate::train::{init_model, train, TrainOptions, TrainOutcome};

pub const SPLIT_FILES: [&str; 3] = ["train.jsonl", "valid.jsonl", "test.jsonl"];

/// RDF subgraphs per resource of `graph`, materialized and split 80/10/10.
pub fn rdf_corpus(graph: &RdfGraph, split_seed: u64) -> Result<CorpusSplit<RdfGraph>, HarnessError> {
    let parts = split_rdf_per_resource(graph);
    build_corpus(parts, |g| Ok::<_, std::convert::Infallible>(materialize_rdfs(g)), split_seed)
        .map_err(|e| HarnessError::Reasoner(e.to_string()))
}

pub fn el_corpus(run: &RunConfig) -> Result<CorpusSplit<ptrlogic_core::logic::ElKb>, HarnessError> {
    generate_el_corpus(&run.gen, run.count, run.split_seed)
}

pub fn write_split<T: Theory>(dir: &Path, split: &CorpusSplit<T>) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    for (name, pairs) in SPLIT_FILES.iter().zip([&split.train, &split.valid, &split.test]) {
        let path = dir.join(name);
        fs::write(&path, write_jsonl(pairs.iter())).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}

/// Logic named by the first record of a JSONL file.
pub fn jsonl_logic(text: &str) -> Result<Logic, HarnessError> {
    let Some(line) = text.lines().find(|l| !l.trim().is_empty()) else {
        return Err(HarnessError::Parse("empty corpus file".into()));
    };
    let v: serde_json::Value = serde_json::from_str(line).map_err(|e| HarnessError::Parse(e.to_string()))?;
    v.get("logic")
        .and_then(|l| l.as_str())
        .and_then(Logic::from_name)
        .ok_or_else(|| HarnessError::Parse("record without a known logic".into()))
}

pub fn read_text(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

/// Writes the encoded splits as JSON lines (`id`, `input_tokens`,
/// `target_indices`) next to the fitted tokenizer.
pub fn write_encoded(dir: &Path, prepared: &PreparedSplit) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    for (name, pairs) in SPLIT_FILES.iter().zip([&prepared.train, &prepared.valid, &prepared.test]) {
        let path = dir.join(name);
        let text: String = pairs.iter().map(|p| p.to_json_line() + "\n").collect();
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    }
    let path = dir.join("tokenizer.txt");
    fs::write(&path, tokenizer_to_text(&prepared.tokenizer)).map_err(|e| HarnessError::io(&path, e))
}

pub fn read_split<T: Theory>(dir: &Path) -> Result<CorpusSplit<T>, HarnessError> {
    let read = |name: &str| -> Result<_, HarnessError> { Ok(read_jsonl(&read_text(&dir.join(name))?)?) };
    Ok(CorpusSplit {
        train: read(SPLIT_FILES[0])?,
        valid: read(SPLIT_FILES[1])?,
        test: read(SPLIT_FILES[2])?,
    })
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Experiment<R> {
    pub outcome: TrainOutcome<R>,
    pub prepared: PreparedSplit,
    /// Selected model on the test split.
    pub test: RunMetrics,
}

/// Prepares `split` as configured, trains on its training part with
/// validation on its validation part, and evaluates the selected model on
/// the test part.
pub fn run_experiment<T: Theory, R: Real + Send + Sync>(
    split: &CorpusSplit<T>,
    run: &RunConfig,
    label: &str,
) -> Result<Experiment<R>, HarnessError> {
    let prepared = prepare_split(split, &run.prep)?;
    let model = init_model::<R>(run.model.clone(), &prepared.train, &run.train)?;
    let opts = TrainOptions {
        threads: run.threads,
        eval_every: run.eval_every,
        target_exact_match: run.target_exact_match,
    };
    let outcome = train(model, &prepared.train, &prepared.valid, &prepared.tokenizer, &run.train, &opts)?;
    let mut test = evaluate_exact_match(&outcome.model, &prepared.test, &prepared.tokenizer, label, run.threads)?;
    test.loss_curve = outcome.curve.clone();
    Ok(Experiment {
        outcome,
        prepared,
        test,
    })
}

/// Scores a trained model on pairs of any corpus, prepared with the
/// model's own tokenizer and normalization settings.
pub fn evaluate_on<T: Theory, R: Real + Send + Sync>(
    model: &Model<R>,
    tokenizer: &Tokenizer,
    run: &RunConfig,
    pairs: &[ptrlogic_core::corpus::CorpusPair<T>],
    label: &str,
) -> Result<RunMetrics, HarnessError> {
    let encoded = encode_pairs(pairs, tokenizer, &run.prep)?;
    evaluate_exact_match(model, &encoded, tokenizer, label, run.threads)
}
