//! Greedy-decoding evaluation: exact match, token accuracy and per-axiom
//! set precision, recall and F1.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use ptrlogic_core::logic::{END_MARKER, SEPARATOR};
use ptrlogic_core::preprocess::{decode_pointers, EncodedPair, Tokenizer};
use ptrlogic_neural::vocab::OutputVocab;
use ptrlogic_neural::{Model, Real};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean per-step training loss; absent before the first update.
    pub train_loss: Option<f64>,
    pub valid_loss: f64,
    pub valid_exact_match: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub label: String,
    pub pairs: usize,
    pub exact_match: f64,
    pub token_accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(default)]
    pub loss_curve: Vec<EpochRecord>,
    #[serde(default)]
    pub wall_clock_secs: f64,
}

impl RunMetrics {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("metrics serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(line).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    /// The same record with timing cleared, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_clock_secs: 0.0,
            ..self.clone()
        }
    }
}

/// Outcome for a single pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub id: String,
    /// Whole-sequence match, including the end marker.
    pub exact: bool,
    /// Same comparison made on the decoded statement text.
    pub exact_text: bool,
    pub correct_tokens: usize,
    pub target_tokens: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub predicted: Vec<String>,
}

/// Maps each pointed position to the first position holding the same token,
/// the convention used for targets.
pub fn canonical_indices(input: &[String], indices: &[usize]) -> Vec<usize> {
    indices
        .iter()
        .map(|&i| {
            input
                .iter()
                .position(|t| *t == input[i])
                .expect("the token occurs at i")
        })
        .collect()
}

/// Statement strings of a completion token sequence.
pub fn statements(tokens: &[String], tokenizer: &Tokenizer) -> Vec<String> {
    tokens
        .split(|t| t == SEPARATOR)
        .filter(|s| !s.is_empty())
        .map(|s| tokenizer.detokenize(s))
        .collect()
}

fn set_scores(pred: &[String], gold: &[String]) -> (f64, f64, f64) {
    let p: HashSet<&String> = pred.iter().collect();
    let g: HashSet<&String> = gold.iter().collect();
    if p.is_empty() && g.is_empty() {
        return (1.0, 1.0, 1.0);
    }
    let hit = p.intersection(&g).count() as f64;
    let precision = if p.is_empty() { 0.0 } else { hit / p.len() as f64 };
    let recall = if g.is_empty() { 0.0 } else { hit / g.len() as f64 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1)
}

/// Decodes one pair and scores it against its target.
pub fn evaluate_pair<R: Real>(
    model: &Model<R>,
    pair: &EncodedPair,
    tokenizer: &Tokenizer,
) -> Result<PairOutcome, HarnessError> {
    let gold = decode_pointers(&pair.input_tokens, &pair.target_indices)?;
    let ids = model.decode_greedy(&pair.input_tokens, model.config.max_output_len)?;
    // Output token sequences, end marker included when emitted.
    let (predicted, pred_seq, exact) = match &model.out_vocab {
        None => {
            let canon = canonical_indices(&pair.input_tokens, &ids);
            let seq: Vec<String> = canon.iter().map(|&i| pair.input_tokens[i].clone()).collect();
            let predicted = decode_pointers(&pair.input_tokens, &canon)?;
            (predicted, seq, canon == pair.target_indices)
        }
        Some(o) => {
            let seq: Vec<String> = ids.iter().map(|&i| o.token(i).to_string()).collect();
            let predicted = ids
                .iter()
                .take_while(|&&i| i != OutputVocab::END)
                .map(|&i| o.token(i).to_string())
                .collect();
            let mut gold_seq = gold.clone();
            gold_seq.push(END_MARKER.to_string());
            let exact = seq == gold_seq;
            (predicted, seq, exact)
        }
    };
    let ended = pred_seq.last().map(String::as_str) == Some(END_MARKER);
    let gold_statements = statements(&gold, tokenizer);
    let pred_statements = statements(&predicted, tokenizer);
    let exact_text = ended && tokenizer.detokenize(&predicted) == tokenizer.detokenize(&gold);
    let target_tokens = pair.target_indices.len();
    let correct_tokens = pred_seq
        .iter()
        .zip(gold.iter().map(String::as_str).chain([END_MARKER]))
        .filter(|(p, g)| p.as_str() == *g)
        .count();
    let (precision, recall, f1) = set_scores(&pred_statements, &gold_statements);
    Ok(PairOutcome {
        id: pair.id.clone(),
        exact,
        exact_text,
        correct_tokens,
        target_tokens,
        precision,
        recall,
        f1,
        predicted,
    })
}

/// Evaluates every pair, split into `threads` contiguous chunks against
/// the read-only model. Outcomes come back in input order.
pub fn evaluate_pairs<R: Real + Send + Sync>(
    model: &Model<R>,
    pairs: &[EncodedPair],
    tokenizer: &Tokenizer,
    threads: usize,
) -> Result<Vec<PairOutcome>, HarnessError> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let threads = threads.clamp(1, pairs.len());
    if threads == 1 {
        return pairs.iter().map(|p| evaluate_pair(model, p, tokenizer)).collect();
    }
    let size = pairs.len().div_ceil(threads);
    let chunks: Vec<Result<Vec<PairOutcome>, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .chunks(size)
            .map(|c| s.spawn(move || c.iter().map(|p| evaluate_pair(model, p, tokenizer)).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(pairs.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Aggregates outcomes. Precision, recall and F1 are averaged per pair, so
/// F1 is never below exact match.
pub fn summarize(label: &str, outcomes: &[PairOutcome]) -> RunMetrics {
    let n = outcomes.len();
    let mean = |f: &dyn Fn(&PairOutcome) -> f64| {
        if n == 0 {
            0.0
        } else {
            outcomes.iter().map(f).sum::<f64>() / n as f64
        }
    };
    let targets: usize = outcomes.iter().map(|o| o.target_tokens).sum();
    let correct: usize = outcomes.iter().map(|o| o.correct_tokens).sum();
    RunMetrics {
        label: label.to_string(),
        pairs: n,
        exact_match: mean(&|o| o.exact as u8 as f64),
        token_accuracy: if targets == 0 {
            0.0
        } else {
            correct as f64 / targets as f64
        },
        precision: mean(&|o| o.precision),
        recall: mean(&|o| o.recall),
        f1: mean(&|o| o.f1),
        loss_curve: Vec::new(),
        wall_clock_secs: 0.0,
    }
}

pub fn evaluate_exact_match<R: Real + Send + Sync>(
    model: &Model<R>,
    pairs: &[EncodedPair],
    tokenizer: &Tokenizer,
    label: &str,
    threads: usize,
) -> Result<RunMetrics, HarnessError> {
    let start = std::time::Instant::now();
    let outcomes = evaluate_pairs(model, pairs, tokenizer, threads)?;
    let mut m = summarize(label, &outcomes);
    m.wall_clock_secs = start.elapsed().as_secs_f64();
    Ok(m)
}

/// Evaluation of a model on pairs from another corpus, already encoded with
/// the model's tokenizer and normalization. Parameters are never touched.
pub fn evaluate_transfer<R: Real + Send + Sync>(
    model: &Model<R>,
    pairs: &[EncodedPair],
    tokenizer: &Tokenizer,
    label: &str,
    threads: usize,
) -> Result<RunMetrics, HarnessError> {
    evaluate_exact_match(model, pairs, tokenizer, label, threads)
}
