//! Token-to-row maps for the input embedding table and the closed output
//! vocabulary of the vanilla decoder.
//!
//! Tokens outside the known set share `buckets` extra rows chosen by an
//! FNV-1a hash, so an unseen symbol always lands on the same row.

use std::collections::HashMap;
use std::hash::Hasher;

use fnv::FnvHasher;
use thiserror::Error;

use ptrlogic_core::logic::el::is_reserved;
use ptrlogic_core::logic::rdf::CONCLUSION_VOCABULARY;
use ptrlogic_core::logic::END_MARKER;

pub const UNKNOWN: &str = "[UNK]";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("malformed vocabulary header {0:?}")]
    Header(String),
    #[error("vocabulary needs at least one hash bucket")]
    NoBuckets,
}

/// Operators and RDF vocabulary keep a dedicated row even when all other
/// symbols are hashed.
pub fn is_fixed_token(token: &str) -> bool {
    is_reserved(token) || token.starts_with("<rdf:") || token.starts_with("<rdfs:")
}

fn fixed_tokens() -> Vec<String> {
    let mut v: Vec<String> = ptrlogic_core::logic::RESERVED_TOKENS
        .iter()
        .map(|s| s.to_string())
        .collect();
    v.extend(CONCLUSION_VOCABULARY.iter().map(|s| format!("<{s}>")));
    v
}

pub fn fnv_bucket(token: &str, buckets: usize) -> usize {
    let mut h = FnvHasher::default();
    h.write(token.as_bytes());
    (h.finish() % buckets as u64) as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    buckets: usize,
    hash_symbols: bool,
}

impl Vocab {
    /// Known rows: fixed tokens, then (unless `hash_symbols`) every other
    /// token of `sequences` in first-occurrence order.
    pub fn build<'a, I>(sequences: I, buckets: usize, hash_symbols: bool) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        if buckets == 0 {
            return Err(VocabError::NoBuckets);
        }
        let mut tokens = fixed_tokens();
        if !hash_symbols {
            let mut seen: std::collections::HashSet<String> = tokens.iter().cloned().collect();
            for seq in sequences {
                for t in seq {
                    if seen.insert(t.clone()) {
                        tokens.push(t.clone());
                    }
                }
            }
        }
        Ok(Self::from_tokens(tokens, buckets, hash_symbols))
    }

    fn from_tokens(tokens: Vec<String>, buckets: usize, hash_symbols: bool) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            tokens,
            index,
            buckets,
            hash_symbols,
        }
    }

    pub fn known(&self) -> usize {
        self.tokens.len()
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn hash_symbols(&self) -> bool {
        self.hash_symbols
    }

    /// Rows of the embedding table.
    pub fn rows(&self) -> usize {
        self.tokens.len() + self.buckets
    }

    pub fn is_known(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn row(&self, token: &str) -> usize {
        match self.index.get(token) {
            Some(&i) => i,
            None => self.tokens.len() + fnv_bucket(token, self.buckets),
        }
    }

    /// Header line `buckets=<n> hash_symbols=<0|1>`, then one token per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "buckets={} hash_symbols={}\n",
            self.buckets, self.hash_symbols as u8
        );
        for t in &self.tokens {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, VocabError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let bad = || VocabError::Header(header.to_string());
        let mut buckets = None;
        let mut hash_symbols = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("buckets", v)) => buckets = v.parse::<usize>().ok(),
                Some(("hash_symbols", v)) => hash_symbols = Some(v == "1"),
                _ => return Err(bad()),
            }
        }
        let buckets = buckets.ok_or_else(bad)?;
        if buckets == 0 {
            return Err(VocabError::NoBuckets);
        }
        let tokens = lines.map(str::to_string).collect();
        Ok(Self::from_tokens(tokens, buckets, hash_symbols.ok_or_else(bad)?))
    }
}

/// Closed output vocabulary: `[EOS]` is 0 and `[UNK]` is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputVocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl OutputVocab {
    pub const END: usize = 0;
    pub const UNK: usize = 1;

    pub fn build<'a, I>(sequences: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut tokens = vec![END_MARKER.to_string(), UNKNOWN.to_string()];
        let mut seen: std::collections::HashSet<String> = tokens.iter().cloned().collect();
        for seq in sequences {
            for t in seq {
                if seen.insert(t.clone()) {
                    tokens.push(t.clone());
                }
            }
        }
        Self::from_tokens(tokens)
    }

    fn from_tokens(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(Self::UNK)
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn to_text(&self) -> String {
        self.tokens.iter().map(|t| format!("{t}\n")).collect()
    }

    pub fn from_text(text: &str) -> Self {
        Self::from_tokens(text.lines().map(str::to_string).collect())
    }
}
