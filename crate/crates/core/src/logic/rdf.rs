//! RDF terms, triples and a line-based N-Triples-like reader.
//!
//! Terms are opaque strings. Vocabulary IRIs from the RDF and RDFS
//! namespaces are stored in their short `rdf:` / `rdfs:` form so that the
//! long and short spellings compare equal.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const RDF_PREFIX: &str = "rdf:";
pub const RDFS_PREFIX: &str = "rdfs:";

pub const RDF_TYPE: &str = "rdf:type";
pub const RDFS_SUBCLASS_OF: &str = "rdfs:subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "rdfs:subPropertyOf";
pub const RDFS_DOMAIN: &str = "rdfs:domain";
pub const RDFS_RANGE: &str = "rdfs:range";

/// Vocabulary terms that rule conclusions can introduce.
pub const CONCLUSION_VOCABULARY: [&str; 3] = [RDF_TYPE, RDFS_SUBCLASS_OF, RDFS_SUBPROPERTY_OF];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Namespace {
    Rdf,
    Rdfs,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    text: Arc<str>,
    namespace: Namespace,
}

impl Term {
    /// Builds a term from an IRI or symbol, without angle brackets.
    pub fn new(text: &str) -> Self {
        let (text, namespace) = if let Some(local) = text.strip_prefix(RDF_NS) {
            (format!("{RDF_PREFIX}{local}"), Namespace::Rdf)
        } else if let Some(local) = text.strip_prefix(RDFS_NS) {
            (format!("{RDFS_PREFIX}{local}"), Namespace::Rdfs)
        } else if text.starts_with(RDF_PREFIX) {
            (text.to_string(), Namespace::Rdf)
        } else if text.starts_with(RDFS_PREFIX) {
            (text.to_string(), Namespace::Rdfs)
        } else {
            (text.to_string(), Namespace::Plain)
        };
        Self {
            text: Arc::from(text),
            namespace,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn namespace(&self) -> Namespace {
        self.namespace
    }

    pub fn is_vocabulary(&self) -> bool {
        self.namespace != Namespace::Plain
    }

    /// The bracketed token form used in files and sequences.
    pub fn token(&self) -> String {
        format!("<{}>", self.text)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub s: Term,
    pub p: Term,
    pub o: Term,
}

impl Triple {
    pub fn new(s: Term, p: Term, o: Term) -> Self {
        Self { s, p, o }
    }

    pub fn from_strs(s: &str, p: &str, o: &str) -> Self {
        Self::new(Term::new(s), Term::new(p), Term::new(o))
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.s, &self.p, &self.o]
    }

    /// `<s> <p> <o>` without the terminating dot.
    pub fn sequence_text(&self) -> String {
        format!("{} {} {}", self.s, self.p, self.o)
    }

    /// Renames plain terms; vocabulary terms are left alone.
    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Self {
        let mut r = |t: &Term| {
            if t.is_vocabulary() {
                t.clone()
            } else {
                Term::new(&f(t.as_str()))
            }
        };
        let s = r(&self.s);
        let p = r(&self.p);
        let o = r(&self.o);
        Self::new(s, p, o)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleParseError {
    #[error("expected 3 terms before '.', found {0}")]
    Arity(usize),
    #[error("missing terminal '.'")]
    MissingDot,
    #[error("malformed term {0:?}")]
    BadTerm(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<TripleParseError>,
    },
}

fn parse_term(token: &str) -> Result<Term, TripleParseError> {
    let inner = match token.strip_prefix('<') {
        Some(rest) => rest
            .strip_suffix('>')
            .ok_or_else(|| TripleParseError::BadTerm(token.to_string()))?,
        None if !token.contains(['<', '>']) => token,
        None => return Err(TripleParseError::BadTerm(token.to_string())),
    };
    if inner.is_empty() || inner.contains(['<', '>']) {
        return Err(TripleParseError::BadTerm(token.to_string()));
    }
    Ok(Term::new(inner))
}

/// Parses `<s> <p> <o> .`; bare symbols are accepted in place of bracketed
/// IRIs.
pub fn parse_triple_line(line: &str) -> Result<Triple, TripleParseError> {
    let mut tokens: Vec<&str> = line.split_whitespace().collect();
    match tokens.last() {
        Some(&".") => {
            tokens.pop();
        }
        Some(last) if last.ends_with(">.") => {
            // `<o>.` with no space before the dot
            let n = tokens.len();
            tokens[n - 1] = &last[..last.len() - 1];
        }
        _ => {
            return Err(if tokens.len() == 3 {
                TripleParseError::MissingDot
            } else {
                TripleParseError::Arity(tokens.len())
            })
        }
    }
    if tokens.len() != 3 {
        return Err(TripleParseError::Arity(tokens.len()));
    }
    Ok(Triple::new(
        parse_term(tokens[0])?,
        parse_term(tokens[1])?,
        parse_term(tokens[2])?,
    ))
}

/// Parses a statement in sequence form (`<s> <p> <o>`, optional dot).
pub fn parse_triple_statement(text: &str) -> Result<Triple, TripleParseError> {
    let trimmed = text.trim_end();
    if trimmed.ends_with('.') {
        parse_triple_line(trimmed)
    } else {
        parse_triple_line(&format!("{trimmed} ."))
    }
}

/// An RDF graph: triples in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RdfGraph {
    triples: Vec<Triple>,
}

impl RdfGraph {
    pub fn new(triples: Vec<Triple>) -> Self {
        Self { triples }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn triple_set(&self) -> HashSet<Triple> {
        self.triples.iter().cloned().collect()
    }

    pub fn distinct_triples(&self) -> Vec<Triple> {
        let mut seen = HashSet::new();
        self.triples
            .iter()
            .filter(|t| seen.insert(*t))
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Self {
        Self::new(self.triples.iter().map(|t| t.rename(&mut f)).collect())
    }

    /// Reads triple lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, TripleParseError> {
        let mut triples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            triples.push(
                parse_triple_line(trimmed).map_err(|e| TripleParseError::AtLine {
                    line: i + 1,
                    source: Box::new(e),
                })?,
            );
        }
        Ok(Self::new(triples))
    }

    pub fn to_nt(&self) -> String {
        let mut out = String::new();
        for t in self.distinct_triples() {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromIterator<Triple> for RdfGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
