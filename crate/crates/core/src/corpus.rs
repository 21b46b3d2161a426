//! Input/completion pairs, the shuffled 80/10/10 split and the JSONL
//! record format.
//!
//! One record per line:
//!
//! ```text
//! {"format_version":1,"logic":"el","id":3,"input":["C1 <= C2",...],
//!  "completion":["C1 <= C3",...],"meta":{"split_seed":7,"gen_seed":42,
//!  "config_hash":"..."}}
//! ```
//!
//! Statements use their one-line sequence text. `gen_seed` and
//! `config_hash` are present for generated KBs only.

use std::fmt;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Completion, Logic, Statement, StatementParseError, Theory};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMeta {
    pub split_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPair<T: Theory> {
    /// Position of the KB in the list handed to [`build_corpus`].
    pub id: usize,
    pub kb: T,
    pub completion: Completion<T::Stmt>,
    pub meta: PairMeta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit<T: Theory> {
    pub train: Vec<CorpusPair<T>>,
    pub valid: Vec<CorpusPair<T>>,
    pub test: Vec<CorpusPair<T>>,
}

impl<T: Theory> CorpusSplit<T> {
    pub fn len(&self) -> usize {
        self.train.len() + self.valid.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn all(&self) -> impl Iterator<Item = &CorpusPair<T>> {
        self.train.iter().chain(&self.valid).chain(&self.test)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError<E: std::error::Error + 'static> {
    #[error("oracle failed on KB {index}: {source}")]
    Oracle {
        index: usize,
        #[source]
        source: E,
    },
}

/// Split sizes for `n` items: round(0.8n), round(0.1n), and the rest.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = (0.8 * n as f64).round() as usize;
    let valid = ((0.1 * n as f64).round() as usize).min(n - train);
    (train, valid, n - train - valid)
}

/// Runs `oracle` on every KB, shuffles with `rng_seed` and splits 80/10/10.
pub fn build_corpus<T, E, F>(
    kbs: Vec<T>,
    oracle: F,
    rng_seed: u64,
) -> Result<CorpusSplit<T>, CorpusError<E>>
where
    T: Theory,
    E: std::error::Error + 'static,
    F: FnMut(&T) -> Result<Completion<T::Stmt>, E>,
{
    build_corpus_with_meta(kbs.into_iter().map(|kb| (kb, PairMeta::default())).collect(), oracle, rng_seed)
}

/// Like [`build_corpus`], keeping per-KB generator metadata.
pub fn build_corpus_with_meta<T, E, F>(
    kbs: Vec<(T, PairMeta)>,
    mut oracle: F,
    rng_seed: u64,
) -> Result<CorpusSplit<T>, CorpusError<E>>
where
    T: Theory,
    E: std::error::Error + 'static,
    F: FnMut(&T) -> Result<Completion<T::Stmt>, E>,
{
    let mut pairs = Vec::with_capacity(kbs.len());
    for (index, (kb, mut meta)) in kbs.into_iter().enumerate() {
        let completion = oracle(&kb).map_err(|source| CorpusError::Oracle { index, source })?;
        meta.split_seed = rng_seed;
        pairs.push(CorpusPair {
            id: index,
            kb,
            completion,
            meta,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    pairs.shuffle(&mut rng);
    let (n_train, n_valid, _) = split_sizes(pairs.len());
    let test = pairs.split_off(n_train + n_valid);
    let valid = pairs.split_off(n_train);
    Ok(CorpusSplit {
        train: pairs,
        valid,
        test,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Record {
    format_version: u32,
    logic: String,
    id: usize,
    input: Vec<String>,
    completion: Vec<String>,
    meta: PairMeta,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: unsupported format version {version}")]
    Version { line: usize, version: u32 },
    #[error("line {line}: expected logic {expected}, found {found}")]
    Logic {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: {source}")]
    Statement {
        line: usize,
        #[source]
        source: StatementParseError,
    },
}

impl<T: Theory> CorpusPair<T> {
    /// One JSONL line, without the newline.
    pub fn to_json_line(&self) -> String {
        let text = |s: &T::Stmt| s.sequence_text();
        let record = Record {
            format_version: FORMAT_VERSION,
            logic: T::Stmt::LOGIC.name().to_string(),
            id: self.id,
            input: self.kb.statements().iter().map(text).collect(),
            completion: self.completion.derived().iter().map(text).collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_string(&record).expect("records serialize")
    }

    /// Parses a line written by [`CorpusPair::to_json_line`]. The stored
    /// completion order is kept as is.
    pub fn from_json_line(line: &str, line_no: usize) -> Result<Self, RecordError> {
        let record: Record = serde_json::from_str(line).map_err(|source| RecordError::Json {
            line: line_no,
            source,
        })?;
        if record.format_version != FORMAT_VERSION {
            return Err(RecordError::Version {
                line: line_no,
                version: record.format_version,
            });
        }
        let expected = T::Stmt::LOGIC;
        if Logic::from_name(&record.logic) != Some(expected) {
            return Err(RecordError::Logic {
                line: line_no,
                expected: expected.name(),
                found: record.logic,
            });
        }
        let parse = |v: &[String]| -> Result<Vec<T::Stmt>, RecordError> {
            v.iter()
                .map(|s| {
                    T::Stmt::parse_sequence_text(s).map_err(|source| RecordError::Statement {
                        line: line_no,
                        source,
                    })
                })
                .collect()
        };
        Ok(Self {
            id: record.id,
            kb: T::from_statements(parse(&record.input)?),
            completion: Completion::from_ordered(parse(&record.completion)?),
            meta: record.meta,
        })
    }
}

/// Writes pairs as JSONL.
pub fn write_jsonl<'a, T: Theory + 'a>(
    pairs: impl IntoIterator<Item = &'a CorpusPair<T>>,
) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&p.to_json_line());
        out.push('\n');
    }
    out
}

/// Reads JSONL; blank lines are skipped and line numbers are 1-based.
pub fn read_jsonl<T: Theory>(text: &str) -> Result<Vec<CorpusPair<T>>, RecordError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| CorpusPair::from_json_line(l, i + 1))
        .collect()
}

impl<T: Theory> fmt::Display for CorpusSplit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "train={} valid={} test={}",
            self.train.len(),
            self.valid.len(),
            self.test.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::el_reasoner::{complete_el, ReasonerError};
    use crate::logic::{ElAxiom, ElKb};

    fn kbs(n: usize) -> Vec<ElKb> {
        (0..n)
            .map(|i| {
                ElKb::new(vec![
                    ElAxiom::sub(&format!("A{i}"), "B"),
                    ElAxiom::sub("B", "C"),
                ])
            })
            .collect()
    }

    #[test]
    fn sizes() {
        assert_eq!(split_sizes(10), (8, 1, 1));
        assert_eq!(split_sizes(0), (0, 0, 0));
        assert_eq!(split_sizes(1), (1, 0, 0));
        assert_eq!(split_sizes(2000), (1600, 200, 200));
        for n in 0..200 {
            let (a, b, c) = split_sizes(n);
            assert_eq!(a + b + c, n);
        }
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let a = build_corpus(kbs(10), complete_el, 5).unwrap();
        let b = build_corpus(kbs(10), complete_el, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.valid.len(), a.test.len()), (8, 1, 1));
        let mut ids: Vec<usize> = a.all().map(|p| p.id).collect();
        ids.sort();
        assert_eq!(ids, (0..10).collect::<Vec<_>>());
        let c = build_corpus(kbs(10), complete_el, 6).unwrap();
        assert_ne!(
            a.train.iter().map(|p| p.id).collect::<Vec<_>>(),
            c.train.iter().map(|p| p.id).collect::<Vec<_>>()
        );
    }

    #[test]
    fn oracle_error_carries_index() {
        let mut v = kbs(3);
        v[2] = ElKb::new(vec![ElAxiom::sub("bad name", "B")]);
        match build_corpus(v, complete_el, 0) {
            Err(CorpusError::Oracle {
                index: 2,
                source: ReasonerError::NotNormalForm(_),
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let split = build_corpus(kbs(4), complete_el, 1).unwrap();
        let text = write_jsonl(split.all());
        let back: Vec<CorpusPair<ElKb>> = read_jsonl(&text).unwrap();
        assert_eq!(back, split.all().cloned().collect::<Vec<_>>());
        assert!(text.starts_with("{\"format_version\":1,\"logic\":\"el\""));
    }

    #[test]
    fn jsonl_errors() {
        assert!(matches!(
            read_jsonl::<ElKb>("{\"format_version\":2,\"logic\":\"el\",\"id\":0,\"input\":[],\"completion\":[],\"meta\":{\"split_seed\":0}}"),
            Err(RecordError::Version { line: 1, version: 2 })
        ));
        assert!(matches!(
            read_jsonl::<ElKb>("\nnot json"),
            Err(RecordError::Json { line: 2, .. })
        ));
    }
}
