//! RDFS materialization with a declarative rule table.
//!
//! Rules are triple patterns over variables and vocabulary constants, so
//! further entailment rules are added as data. The default table enables:
//!
//! ```text
//! 1  (x sc y), (y sc z)   ⊨ (x sc z)
//! 2  (x sp y), (y sp z)   ⊨ (x sp z)
//! 3  (x sc y), (z type x) ⊨ (z type y)
//! 4  (a dom x), (y a z)   ⊨ (y type x)
//! 5  (a range x), (y a z) ⊨ (z type x)
//! ```

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::logic::rdf::{
    RDFS_DOMAIN, RDFS_RANGE, RDFS_SUBCLASS_OF, RDFS_SUBPROPERTY_OF, RDF_TYPE,
};
use crate::logic::{Completion, RdfGraph, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    /// `?x` is a variable, anything else a constant.
    pub fn parse(s: &str) -> Self {
        match s.strip_prefix('?') {
            Some(v) => PatternTerm::Var(v.to_string()),
            None => PatternTerm::Const(Term::new(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern(pub [PatternTerm; 3]);

impl TriplePattern {
    pub fn parse(s: &str, p: &str, o: &str) -> Self {
        Self([PatternTerm::parse(s), PatternTerm::parse(p), PatternTerm::parse(o)])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {0}: conclusion variable ?{1} does not occur in any premise")]
    UnboundVariable(u8, String),
    #[error("rule {0}: no premises")]
    NoPremises(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfsRule {
    id: u8,
    premises: Vec<TriplePattern>,
    conclusion: TriplePattern,
}

impl RdfsRule {
    pub fn new(
        id: u8,
        premises: Vec<TriplePattern>,
        conclusion: TriplePattern,
    ) -> Result<Self, RuleError> {
        if premises.is_empty() {
            return Err(RuleError::NoPremises(id));
        }
        let bound: HashSet<&String> = premises
            .iter()
            .flat_map(|p| p.0.iter())
            .filter_map(|t| match t {
                PatternTerm::Var(v) => Some(v),
                PatternTerm::Const(_) => None,
            })
            .collect();
        for t in &conclusion.0 {
            if let PatternTerm::Var(v) = t {
                if !bound.contains(v) {
                    return Err(RuleError::UnboundVariable(id, v.clone()));
                }
            }
        }
        Ok(Self {
            id,
            premises,
            conclusion,
        })
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn premises(&self) -> &[TriplePattern] {
        &self.premises
    }

    pub fn conclusion(&self) -> &TriplePattern {
        &self.conclusion
    }
}

/// The five enabled rules, in table order.
pub fn rdfs_rules() -> Vec<RdfsRule> {
    let p = TriplePattern::parse;
    let table = [
        (
            1,
            vec![p("?x", RDFS_SUBCLASS_OF, "?y"), p("?y", RDFS_SUBCLASS_OF, "?z")],
            p("?x", RDFS_SUBCLASS_OF, "?z"),
        ),
        (
            2,
            vec![p("?x", RDFS_SUBPROPERTY_OF, "?y"), p("?y", RDFS_SUBPROPERTY_OF, "?z")],
            p("?x", RDFS_SUBPROPERTY_OF, "?z"),
        ),
        (
            3,
            vec![p("?x", RDFS_SUBCLASS_OF, "?y"), p("?z", RDF_TYPE, "?x")],
            p("?z", RDF_TYPE, "?y"),
        ),
        (
            4,
            vec![p("?a", RDFS_DOMAIN, "?x"), p("?y", "?a", "?z")],
            p("?y", RDF_TYPE, "?x"),
        ),
        (
            5,
            vec![p("?a", RDFS_RANGE, "?x"), p("?y", "?a", "?z")],
            p("?z", RDF_TYPE, "?x"),
        ),
    ];
    table
        .into_iter()
        .map(|(id, premises, conclusion)| {
            RdfsRule::new(id, premises, conclusion).expect("built-in rule is well formed")
        })
        .collect()
}

pub fn rdfs_rule(id: u8) -> Option<RdfsRule> {
    rdfs_rules().into_iter().find(|r| r.id == id)
}

type Id = u32;
type Fact = [Id; 3];

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(Id),
}

struct CompiledRule {
    premises: Vec<[Slot; 3]>,
    conclusion: [Slot; 3],
    vars: usize,
}

#[derive(Default)]
struct Terms {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
}

impl Terms {
    fn id(&mut self, t: &Term) -> Id {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let id = self.terms.len() as Id;
        self.terms.push(t.clone());
        self.ids.insert(t.clone(), id);
        id
    }

    fn fact(&mut self, t: &Triple) -> Fact {
        [self.id(&t.s), self.id(&t.p), self.id(&t.o)]
    }

    fn triple(&self, f: Fact) -> Triple {
        Triple::new(
            self.terms[f[0] as usize].clone(),
            self.terms[f[1] as usize].clone(),
            self.terms[f[2] as usize].clone(),
        )
    }

    fn compile(&mut self, rule: &RdfsRule) -> CompiledRule {
        let mut vars: HashMap<String, usize> = HashMap::new();
        let mut slot = |terms: &mut Terms, t: &PatternTerm| match t {
            PatternTerm::Var(v) => {
                let n = vars.len();
                Slot::Var(*vars.entry(v.clone()).or_insert(n))
            }
            PatternTerm::Const(c) => Slot::Const(terms.id(c)),
        };
        let mut premises = Vec::new();
        for p in &rule.premises {
            premises.push([
                slot(self, &p.0[0]),
                slot(self, &p.0[1]),
                slot(self, &p.0[2]),
            ]);
        }
        let conclusion = [
            slot(self, &rule.conclusion.0[0]),
            slot(self, &rule.conclusion.0[1]),
            slot(self, &rule.conclusion.0[2]),
        ];
        CompiledRule {
            premises,
            conclusion,
            vars: vars.len(),
        }
    }
}

/// Facts indexed by predicate and by (predicate, subject).
#[derive(Default)]
struct FactIndex {
    all: Vec<Fact>,
    set: HashSet<Fact>,
    by_p: HashMap<Id, Vec<Fact>>,
    by_ps: HashMap<(Id, Id), Vec<Fact>>,
}

impl FactIndex {
    fn insert(&mut self, f: Fact) -> bool {
        if !self.set.insert(f) {
            return false;
        }
        self.all.push(f);
        self.by_p.entry(f[1]).or_default().push(f);
        self.by_ps.entry((f[1], f[0])).or_default().push(f);
        true
    }

    fn candidates(&self, s: Option<Id>, p: Option<Id>) -> &[Fact] {
        let slice = match (p, s) {
            (Some(p), Some(s)) => self.by_ps.get(&(p, s)),
            (Some(p), None) => self.by_p.get(&p),
            (None, _) => return &self.all,
        };
        slice.map(Vec::as_slice).unwrap_or(&[])
    }
}

type Bindings = Vec<Option<Id>>;

fn resolve(slot: Slot, b: &Bindings) -> Option<Id> {
    match slot {
        Slot::Const(c) => Some(c),
        Slot::Var(v) => b[v],
    }
}

fn unify(pattern: &[Slot; 3], fact: Fact, b: &mut Bindings) -> bool {
    let saved = b.clone();
    for (slot, &value) in pattern.iter().zip(fact.iter()) {
        match *slot {
            Slot::Const(c) if c != value => {
                *b = saved;
                return false;
            }
            Slot::Const(_) => {}
            Slot::Var(v) => match b[v] {
                Some(x) if x != value => {
                    *b = saved;
                    return false;
                }
                Some(_) => {}
                None => b[v] = Some(value),
            },
        }
    }
    true
}

/// Joins premises `order[depth..]` against `index` and emits conclusions.
fn join(
    rule: &CompiledRule,
    order: &[usize],
    depth: usize,
    index: &FactIndex,
    b: &mut Bindings,
    out: &mut Vec<Fact>,
) {
    if depth == order.len() {
        let c = &rule.conclusion;
        let fact = [
            resolve(c[0], b).expect("conclusion variables are bound by premises"),
            resolve(c[1], b).expect("conclusion variables are bound by premises"),
            resolve(c[2], b).expect("conclusion variables are bound by premises"),
        ];
        out.push(fact);
        return;
    }
    let pat = &rule.premises[order[depth]];
    let s = resolve(pat[0], b);
    let p = resolve(pat[1], b);
    for &fact in index.candidates(s, p) {
        let saved = b.clone();
        if unify(pat, fact, b) {
            join(rule, order, depth + 1, index, b, out);
        }
        *b = saved;
    }
}

/// Conclusions in which premise `seed` matches a fact from `delta` and the
/// remaining premises match `index`.
fn fire(rule: &CompiledRule, delta: &[Fact], index: &FactIndex, out: &mut Vec<Fact>) {
    for seed in 0..rule.premises.len() {
        let rest: Vec<usize> = (0..rule.premises.len()).filter(|&i| i != seed).collect();
        for &fact in delta {
            let mut b: Bindings = vec![None; rule.vars];
            if unify(&rule.premises[seed], fact, &mut b) {
                join(rule, &rest, 0, index, &mut b, out);
            }
        }
    }
}

/// One-step conclusions of `rule` over `g` that are not already in `g`.
pub fn apply_rdfs_rule(g: &RdfGraph, rule: &RdfsRule) -> HashSet<Triple> {
    let mut terms = Terms::default();
    let mut index = FactIndex::default();
    for t in g.triples() {
        let f = terms.fact(t);
        index.insert(f);
    }
    let compiled = terms.compile(rule);
    let mut out = Vec::new();
    let order: Vec<usize> = (0..compiled.premises.len()).collect();
    let mut b = vec![None; compiled.vars];
    join(&compiled, &order, 0, &index, &mut b, &mut out);
    out.into_iter()
        .filter(|f| !index.set.contains(f))
        .map(|f| terms.triple(f))
        .collect()
}

/// Semi-naive fixpoint of `rules` over `g`.
pub fn materialize_with(g: &RdfGraph, rules: &[RdfsRule]) -> Completion<Triple> {
    let mut terms = Terms::default();
    let mut index = FactIndex::default();
    let mut delta = Vec::new();
    for t in g.triples() {
        let f = terms.fact(t);
        if index.insert(f) {
            delta.push(f);
        }
    }
    let compiled: Vec<CompiledRule> = rules.iter().map(|r| terms.compile(r)).collect();
    let mut fresh = Vec::new();
    while !delta.is_empty() {
        fresh.clear();
        for rule in &compiled {
            fire(rule, &delta, &index, &mut fresh);
        }
        delta.clear();
        for &f in &fresh {
            if index.insert(f) {
                delta.push(f);
            }
        }
    }
    let derived: Vec<Triple> = index.all.iter().map(|&f| terms.triple(f)).collect();
    Completion::from_derived(g, derived)
}

/// Semi-naive fixpoint over the default rule table.
pub fn materialize_rdfs(g: &RdfGraph) -> Completion<Triple> {
    materialize_with(g, &rdfs_rules())
}

/// Round-robin fixpoint over [`apply_rdfs_rule`].
pub fn materialize_rdfs_naive(g: &RdfGraph) -> Completion<Triple> {
    let rules = rdfs_rules();
    let mut current = g.distinct_triples();
    let mut known: HashSet<Triple> = current.iter().cloned().collect();
    loop {
        let mut added = false;
        for rule in &rules {
            let mut fresh: Vec<Triple> = apply_rdfs_rule(&RdfGraph::new(current.clone()), rule)
                .into_iter()
                .collect();
            fresh.sort();
            for t in fresh {
                if known.insert(t.clone()) {
                    current.push(t);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    Completion::from_derived(g, current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(triples: &[(&str, &str, &str)]) -> RdfGraph {
        triples
            .iter()
            .map(|(s, p, o)| Triple::from_strs(s, p, o))
            .collect()
    }

    fn set(triples: &[(&str, &str, &str)]) -> HashSet<Triple> {
        g(triples).triple_set()
    }

    #[test]
    fn table_has_five_rules() {
        let rules = rdfs_rules();
        assert_eq!(rules.iter().map(RdfsRule::id).collect::<Vec<_>>(), [1, 2, 3, 4, 5]);
        assert!(rules.iter().all(|r| r.premises().len() == 2));
    }

    #[test]
    fn rule_examples() {
        let sc = "rdfs:subClassOf";
        assert_eq!(
            apply_rdfs_rule(&g(&[("a1", sc, "a2"), ("a2", sc, "a3")]), &rdfs_rule(1).unwrap()),
            set(&[("a1", sc, "a3")])
        );
        assert_eq!(
            apply_rdfs_rule(
                &g(&[("b", "rdfs:domain", "p"), ("q", "b", "r")]),
                &rdfs_rule(4).unwrap()
            ),
            set(&[("q", "rdf:type", "p")])
        );
        assert_eq!(
            apply_rdfs_rule(&g(&[("x", sc, "y"), ("z", "rdf:type", "x")]), &rdfs_rule(3).unwrap()),
            set(&[("z", "rdf:type", "y")])
        );
    }

    #[test]
    fn subproperty_transitivity() {
        let sp = "rdfs:subPropertyOf";
        assert_eq!(
            apply_rdfs_rule(&g(&[("p", sp, "q"), ("q", sp, "r")]), &rdfs_rule(2).unwrap()),
            set(&[("p", sp, "r")])
        );
    }

    #[test]
    fn materialize_examples() {
        assert!(materialize_rdfs(&RdfGraph::default()).is_empty());
        let sc = "rdfs:subClassOf";
        let chain = g(&[("a1", sc, "a2"), ("a2", sc, "a3"), ("a3", sc, "a4")]);
        assert_eq!(
            materialize_rdfs(&chain).as_set(),
            set(&[("a1", sc, "a3"), ("a1", sc, "a4"), ("a2", sc, "a4")])
        );
        let dr = g(&[("p", "rdfs:range", "k"), ("p", "rdfs:domain", "d"), ("s", "p", "o")]);
        let c = materialize_rdfs(&dr);
        assert_eq!(
            c.as_set(),
            set(&[("o", "rdf:type", "k"), ("s", "rdf:type", "d")])
        );
        // subject-major rank order: s occurs before o
        assert_eq!(c.derived()[0], Triple::from_strs("s", "rdf:type", "d"));
    }

    #[test]
    fn long_and_short_vocabulary_match() {
        let graph = RdfGraph::parse(
            "<x> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <y> .\n\
             <z> <rdf:type> <x> .\n",
        )
        .unwrap();
        assert_eq!(
            materialize_rdfs(&graph).as_set(),
            set(&[("z", "rdf:type", "y")])
        );
    }

    #[test]
    fn rule_validation() {
        let p = TriplePattern::parse;
        assert_eq!(
            RdfsRule::new(9, vec![p("?a", "q", "?b")], p("?a", "q", "?c")),
            Err(RuleError::UnboundVariable(9, "c".into()))
        );
        assert_eq!(
            RdfsRule::new(9, vec![], p("a", "q", "b")),
            Err(RuleError::NoPremises(9))
        );
    }

    #[test]
    fn extra_rules_are_data() {
        // rdfs7: (a sp b), (x a y) ⊨ (x b y)
        let p = TriplePattern::parse;
        let mut rules = rdfs_rules();
        rules.push(
            RdfsRule::new(
                7,
                vec![p("?a", "rdfs:subPropertyOf", "?b"), p("?x", "?a", "?y")],
                p("?x", "?b", "?y"),
            )
            .unwrap(),
        );
        let graph = g(&[("knows", "rdfs:subPropertyOf", "meets"), ("ann", "knows", "bob")]);
        assert_eq!(
            materialize_with(&graph, &rules).as_set(),
            set(&[("ann", "meets", "bob")])
        );
        assert!(materialize_rdfs(&graph).is_empty());
    }

    #[test]
    fn naive_agrees() {
        let graph = g(&[
            ("c1", "rdfs:subClassOf", "c2"),
            ("c2", "rdfs:subClassOf", "c3"),
            ("p", "rdfs:domain", "c1"),
            ("p", "rdfs:range", "c2"),
            ("p", "rdfs:subPropertyOf", "q"),
            ("q", "rdfs:subPropertyOf", "r"),
            ("s", "p", "o"),
        ]);
        assert_eq!(materialize_rdfs(&graph), materialize_rdfs_naive(&graph));
    }
}
