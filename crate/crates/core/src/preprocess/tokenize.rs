//! Whitespace and byte-pair subword tokenizers.
//!
//! Subword pieces that do not end a whitespace word carry the suffix `@@`,
//! so `C12` may become `C@@ 12` and detokenizing removes every `@@ `.
//! Reserved operator tokens are never split.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::logic::el::is_reserved;

pub const CONTINUATION: &str = "@@";

pub fn whitespace_tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpeError {
    #[error("empty training corpus")]
    EmptyCorpus,
    #[error("vocabulary budget {budget} does not exceed the alphabet size {alphabet}")]
    BudgetTooSmall { budget: usize, alphabet: usize },
    #[error("line {line}: malformed merge {text:?}")]
    BadMerge { line: usize, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    ranks: HashMap<(String, String), usize>,
    alphabet: BTreeSet<String>,
    budget: usize,
}

/// Splits a word at boundaries between alphanumeric and other characters.
fn segments(word: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut prev: Option<bool> = None;
    for (i, ch) in word.char_indices() {
        let alnum = ch.is_alphanumeric();
        if prev.is_some_and(|p| p != alnum) {
            out.push(&word[start..i]);
            start = i;
        }
        prev = Some(alnum);
    }
    if start < word.len() {
        out.push(&word[start..]);
    }
    out
}

fn chars(s: &str) -> Vec<String> {
    s.chars().map(String::from).collect()
}

impl BpeModel {
    pub fn from_merges(merges: Vec<(String, String)>, alphabet: BTreeSet<String>) -> Self {
        let ranks = merges
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let budget = alphabet.len() + merges.len();
        Self {
            merges,
            ranks,
            alphabet,
            budget,
        }
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// One merge per line as `left right`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.merges {
            out.push_str(a);
            out.push(' ');
            out.push_str(b);
            out.push('\n');
        }
        out
    }

    /// Reads the merge list; the alphabet is recovered from the merges.
    pub fn from_text(text: &str) -> Result<Self, BpeError> {
        let mut merges = Vec::new();
        let mut alphabet = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            if parts.len() != 2 || parts.iter().any(|p| p.is_empty()) {
                return Err(BpeError::BadMerge {
                    line: i + 1,
                    text: line.to_string(),
                });
            }
            for p in &parts {
                for c in p.chars() {
                    alphabet.insert(c.to_string());
                }
            }
            merges.push((parts[0].to_string(), parts[1].to_string()));
        }
        Ok(Self::from_merges(merges, alphabet))
    }

    fn split_segment(&self, seg: &str) -> Vec<String> {
        let mut pieces = chars(seg);
        loop {
            let best = pieces
                .windows(2)
                .enumerate()
                .filter_map(|(i, w)| {
                    self.ranks
                        .get(&(w[0].clone(), w[1].clone()))
                        .map(|&r| (r, i))
                })
                .min();
            let Some((rank, _)) = best else { break };
            let (a, b) = &self.merges[rank];
            let mut merged = Vec::with_capacity(pieces.len());
            let mut i = 0;
            while i < pieces.len() {
                if i + 1 < pieces.len() && &pieces[i] == a && &pieces[i + 1] == b {
                    merged.push(format!("{a}{b}"));
                    i += 2;
                } else {
                    merged.push(pieces[i].clone());
                    i += 1;
                }
            }
            pieces = merged;
        }
        pieces
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for word in text.split_whitespace() {
            if is_reserved(word) {
                out.push(word.to_string());
                continue;
            }
            let pieces: Vec<String> = segments(word)
                .into_iter()
                .flat_map(|s| self.split_segment(s))
                .collect();
            let last = pieces.len() - 1;
            for (i, p) in pieces.into_iter().enumerate() {
                if i == last {
                    out.push(p);
                } else {
                    out.push(format!("{p}{CONTINUATION}"));
                }
            }
        }
        out
    }
}

/// Learns merges greedily by pair frequency, lexicographically smallest pair
/// first on ties, until `alphabet + merges` reaches `vocab_budget` or no
/// pair is left.
pub fn bpe_train<S: AsRef<str>>(corpus: &[S], vocab_budget: usize) -> Result<BpeModel, BpeError> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for text in corpus {
        for word in text.as_ref().split_whitespace() {
            if is_reserved(word) {
                continue;
            }
            for seg in segments(word) {
                *counts.entry(seg).or_default() += 1;
            }
        }
    }
    if counts.is_empty() {
        return Err(BpeError::EmptyCorpus);
    }
    let mut words: Vec<(Vec<String>, usize)> =
        counts.into_iter().map(|(w, c)| (chars(w), c)).collect();
    words.sort();
    let alphabet: BTreeSet<String> = words.iter().flat_map(|(w, _)| w.iter().cloned()).collect();
    if vocab_budget <= alphabet.len() {
        return Err(BpeError::BudgetTooSmall {
            budget: vocab_budget,
            alphabet: alphabet.len(),
        });
    }
    let mut merges = Vec::new();
    while alphabet.len() + merges.len() < vocab_budget {
        let mut pairs: HashMap<(&str, &str), usize> = HashMap::new();
        for (w, c) in &words {
            for p in w.windows(2) {
                *pairs.entry((p[0].as_str(), p[1].as_str())).or_default() += c;
            }
        }
        let Some((best, _)) = pairs
            .into_iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
        else {
            break;
        };
        let (a, b) = (best.0.to_string(), best.1.to_string());
        for (w, _) in &mut words {
            let mut merged = Vec::with_capacity(w.len());
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == a && w[i + 1] == b {
                    merged.push(format!("{a}{b}"));
                    i += 2;
                } else {
                    merged.push(std::mem::take(&mut w[i]));
                    i += 1;
                }
            }
            *w = merged;
        }
        merges.push((a, b));
    }
    let mut model = BpeModel::from_merges(merges, alphabet);
    model.budget = vocab_budget;
    Ok(model)
}

/// Inverse of the subword split: drops continuation markers.
pub fn join_subwords(tokens: &[String]) -> String {
    tokens.join(" ").replace(&format!("{CONTINUATION} "), "")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tokenizer {
    Whitespace,
    Bpe(BpeModel),
}

impl Tokenizer {
    pub fn name(&self) -> &'static str {
        match self {
            Tokenizer::Whitespace => "ws",
            Tokenizer::Bpe(_) => "bpe",
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Whitespace => whitespace_tokenize(text),
            Tokenizer::Bpe(m) => m.tokenize(text),
        }
    }

    pub fn detokenize(&self, tokens: &[String]) -> String {
        match self {
            Tokenizer::Whitespace => tokens.join(" "),
            Tokenizer::Bpe(_) => join_subwords(tokens),
        }
    }
}
