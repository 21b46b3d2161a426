//! Serialization of pairs into token sequences and pointer targets.
//!
//! The input sequence is a fixed prelude followed by the KB's statements
//! joined by ` ; `. The prelude holds the end marker (always position 0),
//! the separator, and for RDF the vocabulary that rule conclusions can
//! introduce, so every completion token has a position to point at. The
//! target lists, for each completion token, the first position holding
//! that token, followed by the end-marker position.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusPair;
use crate::logic::{Logic, Statement, Theory, END_MARKER, SEPARATOR};
use crate::preprocess::tokenize::Tokenizer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("pair {pair}: token {token:?} does not occur in the input")]
    Unpointable { token: String, pair: String },
    #[error("input has no end marker")]
    NoEndMarker,
    #[error("index {index} out of range for input of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// One training example. Serialized as a JSON line with the fields
/// `id`, `input_tokens` and `target_indices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedPair {
    pub id: String,
    pub input_tokens: Vec<String>,
    pub target_indices: Vec<usize>,
}

impl EncodedPair {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("encoded pairs serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Prelude text for a logic.
pub fn prelude_text(logic: Logic) -> String {
    let mut parts = vec![END_MARKER.to_string(), SEPARATOR.to_string()];
    if logic == Logic::Rdf {
        parts.extend(
            crate::logic::rdf::CONCLUSION_VOCABULARY
                .iter()
                .map(|v| format!("<{v}>")),
        );
    }
    parts.join(" ")
}

/// Statements joined with ` ; `.
pub fn statements_text<S: Statement>(statements: &[S]) -> String {
    statements
        .iter()
        .map(Statement::sequence_text)
        .collect::<Vec<_>>()
        .join(&format!(" {SEPARATOR} "))
}

/// Prelude plus the KB's statements in source order.
pub fn input_text<T: Theory>(kb: &T) -> String {
    let body = statements_text(kb.statements());
    let prelude = prelude_text(T::Stmt::LOGIC);
    if body.is_empty() {
        prelude
    } else {
        format!("{prelude} {body}")
    }
}

/// Maps each completion token to its first position in `input_tokens` and
/// appends the end-marker position.
pub fn encode_pair(
    input_tokens: &[String],
    completion_tokens: &[String],
) -> Result<Vec<usize>, EncodeError> {
    encode_pair_with_id(input_tokens, completion_tokens, "?")
}

pub fn encode_pair_with_id(
    input_tokens: &[String],
    completion_tokens: &[String],
    pair: &str,
) -> Result<Vec<usize>, EncodeError> {
    let mut first: HashMap<&str, usize> = HashMap::new();
    for (i, t) in input_tokens.iter().enumerate() {
        first.entry(t.as_str()).or_insert(i);
    }
    let end = *first.get(END_MARKER).ok_or(EncodeError::NoEndMarker)?;
    let mut out = Vec::with_capacity(completion_tokens.len() + 1);
    for t in completion_tokens {
        let i = first.get(t.as_str()).ok_or_else(|| EncodeError::Unpointable {
            token: t.clone(),
            pair: pair.to_string(),
        })?;
        out.push(*i);
    }
    out.push(end);
    Ok(out)
}

/// Tokens at `indices`, stopping before the first end marker.
pub fn decode_pointers(input_tokens: &[String], indices: &[usize]) -> Result<Vec<String>, EncodeError> {
    let mut out = Vec::new();
    for &i in indices {
        let t = input_tokens.get(i).ok_or(EncodeError::IndexOutOfRange {
            index: i,
            len: input_tokens.len(),
        })?;
        if t == END_MARKER {
            break;
        }
        out.push(t.clone());
    }
    Ok(out)
}

/// Tokenizes and encodes one corpus pair.
pub fn encode_corpus_pair<T: Theory>(
    pair: &CorpusPair<T>,
    tokenizer: &Tokenizer,
) -> Result<EncodedPair, EncodeError> {
    let id = pair.id.to_string();
    let input_tokens = tokenizer.tokenize(&input_text(&pair.kb));
    let completion_tokens = tokenizer.tokenize(&statements_text(pair.completion.derived()));
    let target_indices = encode_pair_with_id(&input_tokens, &completion_tokens, &id)?;
    Ok(EncodedPair {
        id,
        input_tokens,
        target_indices,
    })
}

/// Splits decoded text into statements and parses each one. Fails on the
/// first malformed statement.
pub fn parse_statements<S: Statement>(text: &str) -> Option<Vec<S>> {
    if text.trim().is_empty() {
        return Some(Vec::new());
    }
    text.split(&format!(" {SEPARATOR} "))
        .map(|s| S::parse_sequence_text(s).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::el_reasoner::complete_el;
    use crate::logic::{Completion, ElAxiom, ElKb, RdfGraph, Triple};
    use crate::preprocess::tokenize::whitespace_tokenize;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn hand_example() {
        let input = s(&["[EOS]", "C1", "<=", "C2", ";", "C2", "<=", "C3"]);
        assert_eq!(encode_pair(&input, &s(&["C1", "<=", "C3"])).unwrap(), [1, 2, 7, 0]);
        assert_eq!(encode_pair(&input, &[]).unwrap(), [0]);
        assert_eq!(
            encode_pair(&input, &s(&["C4"])),
            Err(EncodeError::Unpointable {
                token: "C4".into(),
                pair: "?".into()
            })
        );
        assert_eq!(encode_pair(&input[1..], &[]), Err(EncodeError::NoEndMarker));
    }

    #[test]
    fn decode_examples() {
        let input = s(&["[EOS]", "C1", "<=", "C2", ";", "C2", "<=", "C3"]);
        assert!(decode_pointers(&input, &[0]).unwrap().is_empty());
        assert_eq!(decode_pointers(&input, &[3, 2, 7, 0, 1]).unwrap(), s(&["C2", "<=", "C3"]));
        assert_eq!(decode_pointers(&input, &[5]).unwrap(), decode_pointers(&input, &[3]).unwrap());
        assert_eq!(
            decode_pointers(&input, &[8]),
            Err(EncodeError::IndexOutOfRange { index: 8, len: 8 })
        );
    }

    #[test]
    fn corpus_pair_round_trip() {
        let kb = ElKb::new(vec![
            ElAxiom::sub("A", "B"),
            ElAxiom::sub("B", "C"),
            ElAxiom::sub_exists("C", "R", "D"),
        ]);
        let completion = complete_el(&kb).unwrap();
        let pair = CorpusPair {
            id: 4,
            kb,
            completion,
            meta: Default::default(),
        };
        let enc = encode_corpus_pair(&pair, &Tokenizer::Whitespace).unwrap();
        assert_eq!(&enc.input_tokens[..3], s(&["[EOS]", ";", "A"]));
        let decoded = decode_pointers(&enc.input_tokens, &enc.target_indices).unwrap();
        let back: Vec<ElAxiom> = parse_statements(&decoded.join(" ")).unwrap();
        assert_eq!(back, pair.completion.derived());
    }

    #[test]
    fn rdf_prelude_makes_type_pointable() {
        let g = RdfGraph::new(vec![
            Triple::from_strs("p", "rdfs:domain", "d"),
            Triple::from_strs("s", "p", "o"),
        ]);
        let text = input_text(&g);
        assert!(text.starts_with("[EOS] ; <rdf:type> <rdfs:subClassOf> <rdfs:subPropertyOf> <p>"));
        let c = Completion::from_ordered(vec![Triple::from_strs("s", "rdf:type", "d")]);
        let idx = encode_pair(&whitespace_tokenize(&text), &whitespace_tokenize(&statements_text(c.derived())))
            .unwrap();
        assert_eq!(idx[1], 2);
    }
}
