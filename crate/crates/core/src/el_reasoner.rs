//! EL+ classification by exhaustive application of the six completion rules.
//!
//! ```text
//! (1) A ⊑ C,      C ⊑ D                    ⊨ A ⊑ D
//! (2) A ⊑ C1,     A ⊑ C2,    C1 ⊓ C2 ⊑ D   ⊨ A ⊑ D
//! (3) A ⊑ C,      C ⊑ ∃R.D                 ⊨ A ⊑ ∃R.D
//! (4) A ⊑ ∃R.B,   B ⊑ C,     ∃R.C ⊑ D      ⊨ A ⊑ D
//! (5) A ⊑ ∃S.D,   S ⊑ R                    ⊨ A ⊑ ∃R.D
//! (6) A ⊑ ∃R1.C,  C ⊑ ∃R2.D, R1 ∘ R2 ⊑ R   ⊨ A ⊑ ∃R.D
//! ```
//!
//! [`complete_el`] saturates with a worklist: every axiom is joined against
//! the already processed ones exactly once, in every premise position it can
//! take. [`complete_el_naive`] recomputes all single-step conclusions of the
//! whole KB per round and is kept as a reference.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::logic::{Completion, ElAxiom, ElKb};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("axiom {0:?} is not in normal form")]
    NotNormalForm(String),
}

/// One of the six completion rules, numbered 1..=6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(u8);

impl RuleId {
    pub const ALL: [RuleId; 6] = [
        RuleId(1),
        RuleId(2),
        RuleId(3),
        RuleId(4),
        RuleId(5),
        RuleId(6),
    ];

    pub fn new(index: u8) -> Option<Self> {
        (1..=6).contains(&index).then_some(RuleId(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}", self.0)
    }
}

/// True iff every axiom has well-formed operands. The axiom type already
/// restricts the shape.
pub fn is_normal_form(kb: &ElKb) -> bool {
    kb.axioms().iter().all(ElAxiom::is_well_formed)
}

fn check(kb: &ElKb) -> Result<(), ReasonerError> {
    match kb.axioms().iter().find(|a| !a.is_well_formed()) {
        Some(bad) => Err(ReasonerError::NotNormalForm(format!("{bad}"))),
        None => Ok(()),
    }
}

type Id = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Ax {
    Sub(Id, Id),
    Conj(Id, Id, Id),
    SubEx(Id, Id, Id),
    ExSub(Id, Id, Id),
    RoleSub(Id, Id),
    Chain(Id, Id, Id),
}

#[derive(Default)]
struct Interner {
    names: Vec<String>,
    ids: HashMap<String, Id>,
}

impl Interner {
    fn id(&mut self, s: &str) -> Id {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as Id;
        self.names.push(s.to_string());
        self.ids.insert(s.to_string(), id);
        id
    }

    fn intern(&mut self, ax: &ElAxiom) -> Ax {
        match ax {
            ElAxiom::Sub { sub, sup } => Ax::Sub(self.id(sub.as_str()), self.id(sup.as_str())),
            ElAxiom::SubConj { left, right, sup } => Ax::Conj(
                self.id(left.as_str()),
                self.id(right.as_str()),
                self.id(sup.as_str()),
            ),
            ElAxiom::SubExists { sub, role, filler } => Ax::SubEx(
                self.id(sub.as_str()),
                self.id(role.as_str()),
                self.id(filler.as_str()),
            ),
            ElAxiom::ExistsSub { role, filler, sup } => Ax::ExSub(
                self.id(role.as_str()),
                self.id(filler.as_str()),
                self.id(sup.as_str()),
            ),
            ElAxiom::RoleSub { sub, sup } => {
                Ax::RoleSub(self.id(sub.as_str()), self.id(sup.as_str()))
            }
            ElAxiom::RoleChain { first, second, sup } => Ax::Chain(
                self.id(first.as_str()),
                self.id(second.as_str()),
                self.id(sup.as_str()),
            ),
        }
    }

    fn resolve(&self, ax: Ax) -> ElAxiom {
        let n = |id: Id| self.names[id as usize].as_str();
        match ax {
            Ax::Sub(a, b) => ElAxiom::sub(n(a), n(b)),
            Ax::Conj(a, b, c) => ElAxiom::sub_conj(n(a), n(b), n(c)),
            Ax::SubEx(a, r, b) => ElAxiom::sub_exists(n(a), n(r), n(b)),
            Ax::ExSub(r, a, b) => ElAxiom::exists_sub(n(r), n(a), n(b)),
            Ax::RoleSub(r, s) => ElAxiom::role_sub(n(r), n(s)),
            Ax::Chain(r, s, t) => ElAxiom::role_chain(n(r), n(s), n(t)),
        }
    }
}

/// One match of a rule: the premises it consumed and the conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub premises: Vec<ElAxiom>,
    pub conclusion: ElAxiom,
}

/// Every premise match of `rule` over `kb`, including matches whose
/// conclusion is already in `kb`.
pub fn el_rule_instances(kb: &ElKb, rule: RuleId) -> Result<Vec<RuleInstance>, ReasonerError> {
    check(kb)?;
    let mut interner = Interner::default();
    let mut axioms: Vec<Ax> = Vec::new();
    let mut set = HashSet::new();
    for a in kb.axioms() {
        let x = interner.intern(a);
        if set.insert(x) {
            axioms.push(x);
        }
    }
    let subs: Vec<(Id, Id)> = axioms
        .iter()
        .filter_map(|a| match *a {
            Ax::Sub(x, y) => Some((x, y)),
            _ => None,
        })
        .collect();
    let exists: Vec<(Id, Id, Id)> = axioms
        .iter()
        .filter_map(|a| match *a {
            Ax::SubEx(x, r, y) => Some((x, r, y)),
            _ => None,
        })
        .collect();

    let mut out: Vec<(Vec<Ax>, Ax)> = Vec::new();
    match rule.0 {
        1 => {
            for &(a, c) in &subs {
                for &(c2, d) in &subs {
                    if c == c2 {
                        out.push((vec![Ax::Sub(a, c), Ax::Sub(c, d)], Ax::Sub(a, d)));
                    }
                }
            }
        }
        3 => {
            for &(a, c) in &subs {
                for &(c2, r, d) in &exists {
                    if c == c2 {
                        out.push((vec![Ax::Sub(a, c), Ax::SubEx(c, r, d)], Ax::SubEx(a, r, d)));
                    }
                }
            }
        }
        _ => {}
    }
    for ax in &axioms {
        match (rule.0, *ax) {
            (2, Ax::Conj(c1, c2, d)) => {
                for &(a, c) in &subs {
                    if c == c1 && set.contains(&Ax::Sub(a, c2)) {
                        out.push((vec![Ax::Sub(a, c1), Ax::Sub(a, c2), *ax], Ax::Sub(a, d)));
                    }
                }
            }
            (4, Ax::ExSub(r, c, d)) => {
                for &(a, r1, b) in &exists {
                    if r1 == r && set.contains(&Ax::Sub(b, c)) {
                        out.push((vec![Ax::SubEx(a, r, b), Ax::Sub(b, c), *ax], Ax::Sub(a, d)));
                    }
                }
            }
            (5, Ax::RoleSub(s, r)) => {
                for &(a, s1, d) in &exists {
                    if s1 == s {
                        out.push((vec![Ax::SubEx(a, s, d), *ax], Ax::SubEx(a, r, d)));
                    }
                }
            }
            (6, Ax::Chain(r1, r2, r)) => {
                for &(a, s1, c) in &exists {
                    for &(c2, s2, d) in &exists {
                        if s1 == r1 && c2 == c && s2 == r2 {
                            out.push((
                                vec![Ax::SubEx(a, r1, c), Ax::SubEx(c, r2, d), *ax],
                                Ax::SubEx(a, r, d),
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    Ok(out
        .into_iter()
        .map(|(premises, conclusion)| RuleInstance {
            rule,
            premises: premises.into_iter().map(|p| interner.resolve(p)).collect(),
            conclusion: interner.resolve(conclusion),
        })
        .collect())
}

/// One-step conclusions of `rule` over `kb` that are not already in `kb`.
pub fn apply_el_rule(kb: &ElKb, rule: RuleId) -> Result<HashSet<ElAxiom>, ReasonerError> {
    let existing = kb.axiom_set();
    Ok(el_rule_instances(kb, rule)?
        .into_iter()
        .map(|i| i.conclusion)
        .filter(|c| !existing.contains(c))
        .collect())
}

/// Round-robin fixpoint over [`apply_el_rule`]; quadratic per round.
pub fn complete_el_naive(kb: &ElKb) -> Result<Completion<ElAxiom>, ReasonerError> {
    check(kb)?;
    let mut current = kb.distinct_axioms();
    let mut known: HashSet<ElAxiom> = current.iter().cloned().collect();
    loop {
        let mut added = false;
        for rule in RuleId::ALL {
            let snapshot = ElKb::new(current.clone());
            let mut fresh: Vec<ElAxiom> = apply_el_rule(&snapshot, rule)?.into_iter().collect();
            fresh.sort();
            for ax in fresh {
                if known.insert(ax.clone()) {
                    current.push(ax);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(Completion::from_derived(kb, current))
}

#[derive(Default)]
struct Saturation {
    closed: HashSet<Ax>,
    sub_by_lhs: HashMap<Id, Vec<Id>>,
    sub_by_rhs: HashMap<Id, Vec<Id>>,
    ex_by_lhs: HashMap<Id, Vec<(Id, Id)>>,
    ex_by_filler: HashMap<Id, Vec<(Id, Id)>>,
    ex_by_role: HashMap<Id, Vec<(Id, Id)>>,
    conj_by_left: HashMap<Id, Vec<(Id, Id)>>,
    conj_by_right: HashMap<Id, Vec<(Id, Id)>>,
    exsub: HashMap<(Id, Id), Vec<Id>>,
    role_sup: HashMap<Id, Vec<Id>>,
    chain_by_first: HashMap<Id, Vec<(Id, Id)>>,
    chain_by_second: HashMap<Id, Vec<(Id, Id)>>,
}

fn get<'a, K: std::hash::Hash + Eq, V>(m: &'a HashMap<K, Vec<V>>, k: &K) -> &'a [V] {
    m.get(k).map(Vec::as_slice).unwrap_or(&[])
}

impl Saturation {
    fn index(&mut self, ax: Ax) {
        match ax {
            Ax::Sub(a, c) => {
                self.sub_by_lhs.entry(a).or_default().push(c);
                self.sub_by_rhs.entry(c).or_default().push(a);
            }
            Ax::Conj(c1, c2, d) => {
                self.conj_by_left.entry(c1).or_default().push((c2, d));
                self.conj_by_right.entry(c2).or_default().push((c1, d));
            }
            Ax::SubEx(a, r, b) => {
                self.ex_by_lhs.entry(a).or_default().push((r, b));
                self.ex_by_filler.entry(b).or_default().push((a, r));
                self.ex_by_role.entry(r).or_default().push((a, b));
            }
            Ax::ExSub(r, c, d) => self.exsub.entry((r, c)).or_default().push(d),
            Ax::RoleSub(s, r) => self.role_sup.entry(s).or_default().push(r),
            Ax::Chain(r1, r2, r) => {
                self.chain_by_first.entry(r1).or_default().push((r2, r));
                self.chain_by_second.entry(r2).or_default().push((r1, r));
            }
        }
    }

    /// Conclusions with `ax` in any premise position and every other premise
    /// taken from the closed set (which already contains `ax`).
    fn consequences(&self, ax: Ax, out: &mut Vec<Ax>) {
        match ax {
            Ax::Sub(a, c) => {
                // (1) as first and as second premise
                for &d in get(&self.sub_by_lhs, &c) {
                    out.push(Ax::Sub(a, d));
                }
                for &z in get(&self.sub_by_rhs, &a) {
                    out.push(Ax::Sub(z, c));
                }
                // (2)
                for &(c2, d) in get(&self.conj_by_left, &c) {
                    if self.closed.contains(&Ax::Sub(a, c2)) {
                        out.push(Ax::Sub(a, d));
                    }
                }
                for &(c1, d) in get(&self.conj_by_right, &c) {
                    if self.closed.contains(&Ax::Sub(a, c1)) {
                        out.push(Ax::Sub(a, d));
                    }
                }
                // (3)
                for &(r, d) in get(&self.ex_by_lhs, &c) {
                    out.push(Ax::SubEx(a, r, d));
                }
                // (4) with this axiom as B ⊑ C
                for &(z, r) in get(&self.ex_by_filler, &a) {
                    for &d in get(&self.exsub, &(r, c)) {
                        out.push(Ax::Sub(z, d));
                    }
                }
            }
            Ax::Conj(c1, c2, d) => {
                for &a in get(&self.sub_by_rhs, &c1) {
                    if self.closed.contains(&Ax::Sub(a, c2)) {
                        out.push(Ax::Sub(a, d));
                    }
                }
            }
            Ax::SubEx(a, r, b) => {
                // (3)
                for &z in get(&self.sub_by_rhs, &a) {
                    out.push(Ax::SubEx(z, r, b));
                }
                // (4)
                for &c in get(&self.sub_by_lhs, &b) {
                    for &d in get(&self.exsub, &(r, c)) {
                        out.push(Ax::Sub(a, d));
                    }
                }
                // (5)
                for &s in get(&self.role_sup, &r) {
                    out.push(Ax::SubEx(a, s, b));
                }
                // (6) as A ⊑ ∃R1.C
                for &(r2, sup) in get(&self.chain_by_first, &r) {
                    for &(r2b, d) in get(&self.ex_by_lhs, &b) {
                        if r2b == r2 {
                            out.push(Ax::SubEx(a, sup, d));
                        }
                    }
                }
                // (6) as C ⊑ ∃R2.D
                for &(r1, sup) in get(&self.chain_by_second, &r) {
                    for &(z, r1b) in get(&self.ex_by_filler, &a) {
                        if r1b == r1 {
                            out.push(Ax::SubEx(z, sup, b));
                        }
                    }
                }
            }
            Ax::ExSub(r, c, d) => {
                for &b in get(&self.sub_by_rhs, &c) {
                    for &(a, rb) in get(&self.ex_by_filler, &b) {
                        if rb == r {
                            out.push(Ax::Sub(a, d));
                        }
                    }
                }
            }
            Ax::RoleSub(s, r) => {
                for &(a, d) in get(&self.ex_by_role, &s) {
                    out.push(Ax::SubEx(a, r, d));
                }
            }
            Ax::Chain(r1, r2, r) => {
                for &(a, c) in get(&self.ex_by_role, &r1) {
                    for &(r2b, d) in get(&self.ex_by_lhs, &c) {
                        if r2b == r2 {
                            out.push(Ax::SubEx(a, r, d));
                        }
                    }
                }
            }
        }
    }
}

/// The completion of `kb`: everything derivable by rules 1–6 that is not
/// already in `kb`.
pub fn complete_el(kb: &ElKb) -> Result<Completion<ElAxiom>, ReasonerError> {
    check(kb)?;
    let mut interner = Interner::default();
    let mut queue: VecDeque<Ax> = kb.axioms().iter().map(|a| interner.intern(a)).collect();
    let mut sat = Saturation::default();
    let mut fresh = Vec::new();
    while let Some(ax) = queue.pop_front() {
        if !sat.closed.insert(ax) {
            continue;
        }
        sat.index(ax);
        fresh.clear();
        sat.consequences(ax, &mut fresh);
        queue.extend(fresh.iter().filter(|a| !sat.closed.contains(a)));
    }
    let derived = sat.closed.into_iter().map(|a| interner.resolve(a));
    Ok(Completion::from_derived(kb, derived))
}
