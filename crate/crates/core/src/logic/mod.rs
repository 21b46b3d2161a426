//! Shared vocabulary layer: EL+ axioms, RDF triples, symbol tables and the
//! deterministic ordering of completions.

pub mod el;
pub mod rdf;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

pub use el::{
    parse_el_axiom, serialize_el_axiom, ConceptName, ElAxiom, ElKb, ElParseError, NameError,
    RoleName, END_MARKER, RESERVED_TOKENS, SEPARATOR,
};
pub use rdf::{parse_triple_line, Namespace, RdfGraph, Term, Triple, TripleParseError};

/// Which logic a theory belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    El,
    Rdf,
}

impl Logic {
    pub fn name(self) -> &'static str {
        match self {
            Logic::El => "el",
            Logic::Rdf => "rdf",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "el" | "elp" => Some(Logic::El),
            "rdf" | "rdfs" | "nt" => Some(Logic::Rdf),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatementParseError {
    #[error(transparent)]
    El(#[from] ElParseError),
    #[error(transparent)]
    Rdf(#[from] TripleParseError),
}

/// A single statement of a theory (an EL+ axiom or an RDF triple).
pub trait Statement: Clone + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    const LOGIC: Logic;

    /// One-line text used inside token sequences.
    fn sequence_text(&self) -> String;

    fn parse_sequence_text(text: &str) -> Result<Self, StatementParseError>;

    /// Every symbol in written order, vocabulary included.
    fn symbols(&self) -> Vec<&str>;

    /// Symbols that keep their meaning across theories and are never
    /// renamed.
    fn is_fixed_symbol(symbol: &str) -> bool;

    fn rename_symbols(&self, f: &mut dyn FnMut(&str) -> String) -> Self;

    /// Sort key for completions given symbol ranks.
    fn order_key(&self, rank: &HashMap<&str, usize>) -> Vec<usize>;

    /// Symbols rule conclusions may introduce without them occurring in
    /// the input theory.
    fn conclusion_vocabulary() -> &'static [&'static str];
}

impl Statement for ElAxiom {
    const LOGIC: Logic = Logic::El;

    fn sequence_text(&self) -> String {
        self.to_string()
    }

    fn parse_sequence_text(text: &str) -> Result<Self, StatementParseError> {
        Ok(parse_el_axiom(text)?)
    }

    fn symbols(&self) -> Vec<&str> {
        self.operands().iter().map(|o| o.as_str()).collect()
    }

    fn is_fixed_symbol(_symbol: &str) -> bool {
        false
    }

    fn rename_symbols(&self, f: &mut dyn FnMut(&str) -> String) -> Self {
        self.rename(f)
    }

    fn order_key(&self, rank: &HashMap<&str, usize>) -> Vec<usize> {
        let mut key = vec![self.shape_index()];
        key.extend(self.symbols().iter().map(|s| rank_of(rank, s)));
        key
    }

    fn conclusion_vocabulary() -> &'static [&'static str] {
        &[]
    }
}

impl Statement for Triple {
    const LOGIC: Logic = Logic::Rdf;

    fn sequence_text(&self) -> String {
        Triple::sequence_text(self)
    }

    fn parse_sequence_text(text: &str) -> Result<Self, StatementParseError> {
        Ok(rdf::parse_triple_statement(text)?)
    }

    fn symbols(&self) -> Vec<&str> {
        self.terms().iter().map(|t| t.as_str()).collect()
    }

    fn is_fixed_symbol(symbol: &str) -> bool {
        Term::new(symbol).is_vocabulary()
    }

    fn rename_symbols(&self, f: &mut dyn FnMut(&str) -> String) -> Self {
        self.rename(f)
    }

    fn order_key(&self, rank: &HashMap<&str, usize>) -> Vec<usize> {
        self.symbols().iter().map(|s| rank_of(rank, s)).collect()
    }

    fn conclusion_vocabulary() -> &'static [&'static str] {
        &rdf::CONCLUSION_VOCABULARY
    }
}

fn rank_of(rank: &HashMap<&str, usize>, s: &str) -> usize {
    rank.get(s).copied().unwrap_or(usize::MAX)
}

/// A knowledge base: statements in source order.
pub trait Theory: Clone + fmt::Debug + Send + Sync {
    type Stmt: Statement;

    fn statements(&self) -> &[Self::Stmt];

    fn from_statements(statements: Vec<Self::Stmt>) -> Self;

    /// Source order with later duplicates removed.
    fn distinct_statements(&self) -> Vec<Self::Stmt> {
        let mut seen = HashSet::new();
        self.statements()
            .iter()
            .filter(|s| seen.insert(*s))
            .cloned()
            .collect()
    }

    fn rename_symbols(&self, f: &mut dyn FnMut(&str) -> String) -> Self {
        Self::from_statements(self.statements().iter().map(|s| s.rename_symbols(f)).collect())
    }
}

impl Theory for ElKb {
    type Stmt = ElAxiom;

    fn statements(&self) -> &[ElAxiom] {
        self.axioms()
    }

    fn from_statements(statements: Vec<ElAxiom>) -> Self {
        ElKb::new(statements)
    }
}

impl Theory for RdfGraph {
    type Stmt = Triple;

    fn statements(&self) -> &[Triple] {
        self.triples()
    }

    fn from_statements(statements: Vec<Triple>) -> Self {
        RdfGraph::new(statements)
    }
}

/// Distinct symbols of a theory in order of first occurrence.
pub fn kb_symbol_table<T: Theory>(kb: &T) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut table = Vec::new();
    for st in kb.statements() {
        for s in st.symbols() {
            if seen.insert(s) {
                table.push(s.to_string());
            }
        }
    }
    table
}

/// Statements entailed by a theory but absent from it, in a deterministic
/// order.
///
/// The order sorts by statement shape (EL+ only), then by the rank of each
/// symbol in written order. Ranks list the logic's conclusion vocabulary
/// first, followed by the symbol table of the input theory. Because ranks
/// depend only on where symbols first occur, consistently renaming a theory
/// renames its completion without reordering it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion<S> {
    derived: Vec<S>,
}

impl<S: Statement> Completion<S> {
    /// Drops statements already in `kb`, deduplicates, and orders the rest.
    pub fn from_derived<T, I>(kb: &T, derived: I) -> Self
    where
        T: Theory<Stmt = S>,
        I: IntoIterator<Item = S>,
    {
        let input: HashSet<&S> = kb.statements().iter().collect();
        let mut seen = HashSet::new();
        let mut derived: Vec<S> = derived
            .into_iter()
            .filter(|s| !input.contains(s))
            .filter(|s| seen.insert(s.clone()))
            .collect();
        let table = symbol_ranks(kb);
        let rank: HashMap<&str, usize> = table
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        derived.sort_by_cached_key(|s| (s.order_key(&rank), s.sequence_text()));
        Self { derived }
    }

    /// Wraps an already ordered list.
    pub fn from_ordered(derived: Vec<S>) -> Self {
        Self { derived }
    }

    pub fn derived(&self) -> &[S] {
        &self.derived
    }

    pub fn into_derived(self) -> Vec<S> {
        self.derived
    }

    pub fn len(&self) -> usize {
        self.derived.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derived.is_empty()
    }

    pub fn as_set(&self) -> HashSet<S> {
        self.derived.iter().cloned().collect()
    }
}

/// Symbol order used for ranking completions.
pub fn symbol_ranks<T: Theory>(kb: &T) -> Vec<String> {
    let mut table: Vec<String> = T::Stmt::conclusion_vocabulary()
        .iter()
        .map(|s| s.to_string())
        .collect();
    for s in kb_symbol_table(kb) {
        if !table.contains(&s) {
            table.push(s);
        }
    }
    table
}
