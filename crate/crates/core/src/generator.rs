//! Synthetic EL+ knowledge bases and per-resource RDF graph splitting.
//!
//! A generated KB is built around a chain of `difficulty` iterations. Each
//! iteration contains one instance of every completion rule's premises and
//! its conclusions feed the next iteration, so the derivation depth grows
//! with the difficulty. With head `A`, fresh concepts `B..G` and fresh roles
//! `R, S, Q, T`, one iteration is
//!
//! ```text
//! A <= B        B <= C        B & C <= D      C <= EX R . E
//! R <=r S       EX S . E <= G E <= EX Q . F   R o Q <= T
//! ```
//!
//! and `G` heads the next iteration. Every concept gets a reflexive axiom
//! `X <= X`. The remaining budget is spent on random filler axioms over
//! fresh names that touch the chain only through its first head.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::logic::rdf::RDFS_PREFIX;
use crate::logic::el::Operand;
use crate::logic::{ElAxiom, ElKb, RdfGraph, Triple};

/// Axioms contributed by one chain iteration.
pub const CHAIN_AXIOMS: usize = 8;
/// Concepts introduced by one chain iteration (the head is shared).
pub const CHAIN_NEW_CONCEPTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenConfig {
    pub kb_size: usize,
    pub difficulty: usize,
    pub rng_seed: u64,
    pub concept_pool: usize,
    pub role_pool: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            kb_size: 40,
            difficulty: 2,
            rng_seed: 0,
            concept_pool: 1000,
            role_pool: 1000,
        }
    }
}

impl GenConfig {
    /// Chain axioms plus one reflexive axiom per chain concept.
    pub fn minimum_size(difficulty: usize) -> usize {
        let concepts = 1 + CHAIN_NEW_CONCEPTS * difficulty;
        CHAIN_AXIOMS * difficulty + concepts
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.difficulty == 0 {
            return Err(GenError::ZeroDifficulty);
        }
        let minimum = Self::minimum_size(self.difficulty);
        if self.kb_size < minimum {
            return Err(GenError::TooSmall {
                kb_size: self.kb_size,
                difficulty: self.difficulty,
                minimum,
            });
        }
        let concepts = 1 + CHAIN_NEW_CONCEPTS * self.difficulty;
        if self.concept_pool < concepts {
            return Err(GenError::PoolExhausted {
                kind: "concept",
                pool: self.concept_pool,
            });
        }
        if self.role_pool < 4 * self.difficulty {
            return Err(GenError::PoolExhausted {
                kind: "role",
                pool: self.role_pool,
            });
        }
        Ok(())
    }

    /// Hex SHA-256 of the generation-relevant fields, seed excluded.
    pub fn config_hash(&self) -> String {
        let text = format!(
            "kb_size={}\ndifficulty={}\nconcept_pool={}\nrole_pool={}\n",
            self.kb_size, self.difficulty, self.concept_pool, self.role_pool
        );
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("difficulty must be at least 1")]
    ZeroDifficulty,
    #[error("kb_size {kb_size} is below the minimum {minimum} for difficulty {difficulty}")]
    TooSmall {
        kb_size: usize,
        difficulty: usize,
        minimum: usize,
    },
    #[error("{kind} pool of size {pool} is exhausted")]
    PoolExhausted { kind: &'static str, pool: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainIteration {
    /// Head followed by the six fresh concepts; the last one heads the next
    /// iteration.
    pub concepts: [String; 7],
    pub roles: [String; 4],
    pub axioms: Vec<ElAxiom>,
}

/// A generated KB with the structure that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedKb {
    pub kb: ElKb,
    pub seed_concept: String,
    pub chain: Vec<ChainIteration>,
    pub filler: Vec<ElAxiom>,
    pub filler_concepts: Vec<String>,
    pub filler_roles: Vec<String>,
}

struct Names {
    order: Vec<usize>,
    next: usize,
    prefix: char,
    kind: &'static str,
}

impl Names {
    fn new(rng: &mut ChaCha8Rng, pool: usize, prefix: char, kind: &'static str) -> Self {
        let mut order: Vec<usize> = (0..pool).collect();
        order.shuffle(rng);
        Self {
            order,
            next: 0,
            prefix,
            kind,
        }
    }

    fn fresh(&mut self) -> Result<String, GenError> {
        let k = *self.order.get(self.next).ok_or(GenError::PoolExhausted {
            kind: self.kind,
            pool: self.order.len(),
        })?;
        self.next += 1;
        Ok(format!("{}{k}", self.prefix))
    }
}

pub fn gen_el_kb(cfg: &GenConfig) -> Result<ElKb, GenError> {
    Ok(gen_el_kb_detailed(cfg)?.kb)
}

pub fn gen_el_kb_detailed(cfg: &GenConfig) -> Result<GeneratedKb, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut concepts = Names::new(&mut rng, cfg.concept_pool, 'C', "concept");
    let mut roles = Names::new(&mut rng, cfg.role_pool, 'R', "role");

    let seed_concept = concepts.fresh()?;
    let mut chain_concepts = vec![seed_concept.clone()];
    let mut chain = Vec::with_capacity(cfg.difficulty);
    let mut head = seed_concept.clone();
    for _ in 0..cfg.difficulty {
        let mut c: Vec<String> = vec![head.clone()];
        for _ in 0..CHAIN_NEW_CONCEPTS {
            c.push(concepts.fresh()?);
        }
        let r: Vec<String> = (0..4).map(|_| roles.fresh()).collect::<Result<_, _>>()?;
        let (a, b, cc, d, e, f, g) = (&c[0], &c[1], &c[2], &c[3], &c[4], &c[5], &c[6]);
        let (rr, s, q, t) = (&r[0], &r[1], &r[2], &r[3]);
        let axioms = vec![
            ElAxiom::sub(a, b),
            ElAxiom::sub(b, cc),
            ElAxiom::sub_conj(b, cc, d),
            ElAxiom::sub_exists(cc, rr, e),
            ElAxiom::role_sub(rr, s),
            ElAxiom::exists_sub(s, e, g),
            ElAxiom::sub_exists(e, q, f),
            ElAxiom::role_chain(rr, q, t),
        ];
        chain_concepts.extend(c[1..].iter().cloned());
        head = g.clone();
        chain.push(ChainIteration {
            concepts: c.try_into().expect("seven concepts"),
            roles: r.try_into().expect("four roles"),
            axioms,
        });
    }

    let mut budget = cfg.kb_size - GenConfig::minimum_size(cfg.difficulty);
    let mut filler = Filler {
        seed: seed_concept.clone(),
        concepts: vec![seed_concept.clone()],
        new_concepts: Vec::new(),
        roles: Vec::new(),
        axioms: Vec::new(),
        seen: HashSet::new(),
    };
    while budget > 0 {
        let cost = filler.add(&mut rng, &mut concepts, &mut roles, budget)?;
        budget -= cost;
    }

    let mut axioms: Vec<ElAxiom> = chain_concepts
        .iter()
        .chain(filler.new_concepts.iter())
        .map(|c| ElAxiom::sub(c, c))
        .collect();
    for it in &chain {
        axioms.extend(it.axioms.iter().cloned());
    }
    axioms.extend(filler.axioms.iter().cloned());
    debug_assert_eq!(axioms.len(), cfg.kb_size);

    Ok(GeneratedKb {
        kb: ElKb::new(axioms),
        seed_concept,
        chain,
        filler: filler.axioms,
        filler_concepts: filler.new_concepts,
        filler_roles: filler.roles,
    })
}

struct Filler {
    seed: String,
    concepts: Vec<String>,
    new_concepts: Vec<String>,
    roles: Vec<String>,
    axioms: Vec<ElAxiom>,
    seen: HashSet<ElAxiom>,
}

const FILLER_ATTEMPTS: usize = 64;

impl Filler {
    /// Adds one filler axiom (and reflexive axioms for its fresh concepts)
    /// within `budget`, returning the number of statements used.
    fn add(
        &mut self,
        rng: &mut ChaCha8Rng,
        concept_names: &mut Names,
        role_names: &mut Names,
        budget: usize,
    ) -> Result<usize, GenError> {
        let first = self.axioms.is_empty();
        for _ in 0..FILLER_ATTEMPTS {
            let shape = rng.gen_range(0..6);
            let (n_concepts, n_roles) = [(2, 0), (3, 0), (2, 1), (2, 1), (0, 2), (0, 3)][shape];
            let mut fresh_c = Vec::new();
            let mut cs = Vec::new();
            for _ in 0..n_concepts {
                if rng.gen_bool(0.5) {
                    cs.push(None);
                    fresh_c.push(());
                } else {
                    cs.push(Some(self.concepts[rng.gen_range(0..self.concepts.len())].clone()));
                }
            }
            if 1 + fresh_c.len() > budget {
                continue;
            }
            if first && n_concepts > 0 && !cs.iter().any(|c| c.as_deref() == Some(&self.seed)) {
                let slot = rng.gen_range(0..n_concepts);
                cs[slot] = Some(self.seed.clone());
            }
            if first && n_concepts == 0 {
                continue;
            }
            let rs: Vec<Option<String>> = (0..n_roles)
                .map(|_| {
                    if self.roles.is_empty() || rng.gen_bool(0.5) {
                        None
                    } else {
                        Some(self.roles[rng.gen_range(0..self.roles.len())].clone())
                    }
                })
                .collect();
            // Fresh names are only drawn once the candidate is accepted, so
            // placeholders get provisional labels here.
            let label = |v: &Option<String>, i: usize, p: &str| {
                v.clone().unwrap_or_else(|| format!("{p}{i}"))
            };
            let c: Vec<String> = cs.iter().enumerate().map(|(i, v)| label(v, i, "?c")).collect();
            let r: Vec<String> = rs.iter().enumerate().map(|(i, v)| label(v, i, "?r")).collect();
            let candidate = build(shape, &c, &r);
            if trivial(&candidate) || self.seen.contains(&candidate) {
                continue;
            }
            let mut map = std::collections::HashMap::new();
            let mut cost = 1;
            for (i, v) in cs.iter().enumerate() {
                if v.is_none() {
                    let name = concept_names.fresh()?;
                    self.concepts.push(name.clone());
                    self.new_concepts.push(name.clone());
                    map.insert(format!("?c{i}"), name);
                    cost += 1;
                }
            }
            for (i, v) in rs.iter().enumerate() {
                if v.is_none() {
                    let name = role_names.fresh()?;
                    self.roles.push(name.clone());
                    map.insert(format!("?r{i}"), name);
                }
            }
            let ax = candidate.rename(|s| map.get(s).cloned().unwrap_or_else(|| s.to_string()));
            self.seen.insert(ax.clone());
            self.axioms.push(ax);
            return Ok(cost);
        }
        // A seed self-loop through a fresh role, or a fresh role inclusion,
        // always fits in one statement.
        let ax = if first {
            ElAxiom::sub_exists(&self.seed, &role_names.fresh()?, &self.seed)
        } else {
            ElAxiom::role_sub(&role_names.fresh()?, &role_names.fresh()?)
        };
        for op in ax.operands() {
            if let Operand::Role(r) = op {
                self.roles.push(r.to_string());
            }
        }
        self.seen.insert(ax.clone());
        self.axioms.push(ax);
        Ok(1)
    }
}

fn build(shape: usize, c: &[String], r: &[String]) -> ElAxiom {
    match shape {
        0 => ElAxiom::sub(&c[0], &c[1]),
        1 => ElAxiom::sub_conj(&c[0], &c[1], &c[2]),
        2 => ElAxiom::sub_exists(&c[0], &r[0], &c[1]),
        3 => ElAxiom::exists_sub(&r[0], &c[0], &c[1]),
        4 => ElAxiom::role_sub(&r[0], &r[1]),
        _ => ElAxiom::role_chain(&r[0], &r[1], &r[2]),
    }
}

fn trivial(ax: &ElAxiom) -> bool {
    match ax {
        ElAxiom::Sub { sub, sup } => sub == sup,
        ElAxiom::SubConj { left, right, sup } => left == right || left == sup || right == sup,
        ElAxiom::RoleSub { sub, sup } => sub == sup,
        _ => false,
    }
}

/// A random normal-form KB of up to `max_axioms` axioms over `concepts`
/// concept names `A<i>` and `roles` role names `R<i>`, for property checks.
pub fn random_el_kb<R: Rng>(rng: &mut R, max_axioms: usize, concepts: usize, roles: usize) -> ElKb {
    let n = rng.gen_range(0..=max_axioms);
    let c = |rng: &mut R| format!("A{}", rng.gen_range(0..concepts));
    let r = |rng: &mut R| format!("R{}", rng.gen_range(0..roles));
    (0..n)
        .map(|_| match rng.gen_range(0..6) {
            0 => ElAxiom::sub(&c(rng), &c(rng)),
            1 => ElAxiom::sub_conj(&c(rng), &c(rng), &c(rng)),
            2 => ElAxiom::sub_exists(&c(rng), &r(rng), &c(rng)),
            3 => ElAxiom::exists_sub(&r(rng), &c(rng), &c(rng)),
            4 => ElAxiom::role_sub(&r(rng), &r(rng)),
            _ => ElAxiom::role_chain(&r(rng), &r(rng), &r(rng)),
        })
        .collect()
}

/// A random graph of up to `max_triples` triples mixing plain resources
/// `x<i>`, properties `p<i>` and RDFS schema predicates.
pub fn random_rdf_graph<R: Rng>(rng: &mut R, max_triples: usize, resources: usize) -> RdfGraph {
    const PREDICATES: [&str; 8] = [
        "rdfs:subClassOf",
        "rdfs:subPropertyOf",
        "rdfs:domain",
        "rdfs:range",
        "rdf:type",
        "p0",
        "p1",
        "p2",
    ];
    let n = rng.gen_range(0..=max_triples);
    let term = |rng: &mut R| {
        if rng.gen_bool(0.3) {
            format!("p{}", rng.gen_range(0..3))
        } else {
            format!("x{}", rng.gen_range(0..resources))
        }
    };
    (0..n)
        .map(|_| {
            let p = PREDICATES[rng.gen_range(0..PREDICATES.len())];
            let s = term(rng);
            let o = term(rng);
            Triple::from_strs(&s, p, &o)
        })
        .collect()
}

/// One subgraph per subject of a non-schema triple, in order of first
/// occurrence. Each holds the subject's triples plus the schema triples
/// (predicate in the RDFS namespace) whose subject is one of its
/// predicates or objects.
pub fn split_rdf_per_resource(g: &RdfGraph) -> Vec<RdfGraph> {
    let triples = g.distinct_triples();
    let is_schema = |t: &Triple| t.p.as_str().starts_with(RDFS_PREFIX);
    let mut subjects = Vec::new();
    let mut seen = HashSet::new();
    for t in triples.iter().filter(|t| !is_schema(t)) {
        if seen.insert(t.s.clone()) {
            subjects.push(t.s.clone());
        }
    }
    subjects
        .into_iter()
        .map(|r| {
            let own: Vec<Triple> = triples.iter().filter(|t| t.s == r).cloned().collect();
            let hops: HashSet<_> = own.iter().flat_map(|t| [t.p.clone(), t.o.clone()]).collect();
            let schema = triples
                .iter()
                .filter(|t| is_schema(t) && t.s != r && hops.contains(&t.s))
                .cloned();
            own.iter().cloned().chain(schema).collect()
        })
        .collect()
}
