//! EL+ normal-form axioms and their one-line ASCII syntax.
//!
//! | shape            | text               |
//! |------------------|--------------------|
//! | `C ⊑ D`          | `C <= D`           |
//! | `C1 ⊓ C2 ⊑ D`    | `C1 & C2 <= D`     |
//! | `C ⊑ ∃R.D`       | `C <= EX R . D`    |
//! | `∃R.C ⊑ D`       | `EX R . C <= D`    |
//! | `R ⊑ S`          | `R <=r S`          |
//! | `R1 ∘ R2 ⊑ R`    | `R1 o R2 <= R`     |
//!
//! Role inclusion gets its own operator so that a single line is never
//! ambiguous between a concept and a role inclusion.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const SUBSUMED: &str = "<=";
pub const ROLE_SUBSUMED: &str = "<=r";
pub const AND: &str = "&";
pub const EXISTS: &str = "EX";
pub const DOT: &str = ".";
pub const COMPOSE: &str = "o";
/// Statement separator in serialized sequences.
pub const SEPARATOR: &str = ";";
/// End-of-sequence marker; always the first prelude token.
pub const END_MARKER: &str = "[EOS]";

/// Tokens that can never be used as concept or role names.
pub const RESERVED_TOKENS: &[&str] = &[
    SUBSUMED,
    ROLE_SUBSUMED,
    AND,
    EXISTS,
    DOT,
    COMPOSE,
    SEPARATOR,
    END_MARKER,
];

pub fn is_reserved(token: &str) -> bool {
    RESERVED_TOKENS.contains(&token)
}

fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace) && !is_reserved(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty name")]
    Empty,
    #[error("name {0:?} contains whitespace")]
    Whitespace(String),
    #[error("name {0:?} is a reserved token")]
    Reserved(String),
}

fn check_name(s: &str) -> Result<(), NameError> {
    if s.is_empty() {
        Err(NameError::Empty)
    } else if s.chars().any(char::is_whitespace) {
        Err(NameError::Whitespace(s.to_string()))
    } else if is_reserved(s) {
        Err(NameError::Reserved(s.to_string()))
    } else {
        Ok(())
    }
}

macro_rules! symbol_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(id: &str) -> Result<Self, NameError> {
                check_name(id)?;
                Ok(Self(Arc::from(id)))
            }

            /// Builds a name without validation. [`is_normal_form`] will
            /// report such values if they are malformed.
            ///
            /// [`is_normal_form`]: crate::el_reasoner::is_normal_form
            pub fn new_unchecked(id: &str) -> Self {
                Self(Arc::from(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            pub fn is_well_formed(&self) -> bool {
                is_valid_name(&self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

symbol_newtype!(
    /// An atomic concept (class name).
    ConceptName
);
symbol_newtype!(
    /// An atomic role (property name).
    RoleName
);

/// One EL+ axiom in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElAxiom {
    /// `sub ⊑ sup`
    Sub { sub: ConceptName, sup: ConceptName },
    /// `left ⊓ right ⊑ sup`
    SubConj {
        left: ConceptName,
        right: ConceptName,
        sup: ConceptName,
    },
    /// `sub ⊑ ∃role.filler`
    SubExists {
        sub: ConceptName,
        role: RoleName,
        filler: ConceptName,
    },
    /// `∃role.filler ⊑ sup`
    ExistsSub {
        role: RoleName,
        filler: ConceptName,
        sup: ConceptName,
    },
    /// `sub ⊑ sup` over roles
    RoleSub { sub: RoleName, sup: RoleName },
    /// `first ∘ second ⊑ sup`
    RoleChain {
        first: RoleName,
        second: RoleName,
        sup: RoleName,
    },
}

/// A concept or role occurring in an axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand<'a> {
    Concept(&'a ConceptName),
    Role(&'a RoleName),
}

impl<'a> Operand<'a> {
    pub fn as_str(&self) -> &'a str {
        match self {
            Operand::Concept(c) => c.as_str(),
            Operand::Role(r) => r.as_str(),
        }
    }
}

impl ElAxiom {
    pub fn sub(sub: &str, sup: &str) -> Self {
        ElAxiom::Sub {
            sub: ConceptName::new_unchecked(sub),
            sup: ConceptName::new_unchecked(sup),
        }
    }

    pub fn sub_conj(left: &str, right: &str, sup: &str) -> Self {
        ElAxiom::SubConj {
            left: ConceptName::new_unchecked(left),
            right: ConceptName::new_unchecked(right),
            sup: ConceptName::new_unchecked(sup),
        }
    }

    pub fn sub_exists(sub: &str, role: &str, filler: &str) -> Self {
        ElAxiom::SubExists {
            sub: ConceptName::new_unchecked(sub),
            role: RoleName::new_unchecked(role),
            filler: ConceptName::new_unchecked(filler),
        }
    }

    pub fn exists_sub(role: &str, filler: &str, sup: &str) -> Self {
        ElAxiom::ExistsSub {
            role: RoleName::new_unchecked(role),
            filler: ConceptName::new_unchecked(filler),
            sup: ConceptName::new_unchecked(sup),
        }
    }

    pub fn role_sub(sub: &str, sup: &str) -> Self {
        ElAxiom::RoleSub {
            sub: RoleName::new_unchecked(sub),
            sup: RoleName::new_unchecked(sup),
        }
    }

    pub fn role_chain(first: &str, second: &str, sup: &str) -> Self {
        ElAxiom::RoleChain {
            first: RoleName::new_unchecked(first),
            second: RoleName::new_unchecked(second),
            sup: RoleName::new_unchecked(sup),
        }
    }

    /// Position of the shape in the normal-form list, 0..6.
    pub fn shape_index(&self) -> usize {
        match self {
            ElAxiom::Sub { .. } => 0,
            ElAxiom::SubConj { .. } => 1,
            ElAxiom::SubExists { .. } => 2,
            ElAxiom::ExistsSub { .. } => 3,
            ElAxiom::RoleSub { .. } => 4,
            ElAxiom::RoleChain { .. } => 5,
        }
    }

    /// Operands in the order they are written.
    pub fn operands(&self) -> Vec<Operand<'_>> {
        use Operand::{Concept as C, Role as R};
        match self {
            ElAxiom::Sub { sub, sup } => vec![C(sub), C(sup)],
            ElAxiom::SubConj { left, right, sup } => vec![C(left), C(right), C(sup)],
            ElAxiom::SubExists { sub, role, filler } => vec![C(sub), R(role), C(filler)],
            ElAxiom::ExistsSub { role, filler, sup } => vec![R(role), C(filler), C(sup)],
            ElAxiom::RoleSub { sub, sup } => vec![R(sub), R(sup)],
            ElAxiom::RoleChain { first, second, sup } => vec![R(first), R(second), R(sup)],
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.operands().iter().all(|op| is_valid_name(op.as_str()))
    }

    /// Applies `f` to every operand name, keeping the shape.
    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Self {
        let mut n = |s: &dyn fmt::Display| f(&s.to_string());
        match self {
            ElAxiom::Sub { sub, sup } => ElAxiom::sub(&n(sub), &n(sup)),
            ElAxiom::SubConj { left, right, sup } => {
                ElAxiom::sub_conj(&n(left), &n(right), &n(sup))
            }
            ElAxiom::SubExists { sub, role, filler } => {
                ElAxiom::sub_exists(&n(sub), &n(role), &n(filler))
            }
            ElAxiom::ExistsSub { role, filler, sup } => {
                ElAxiom::exists_sub(&n(role), &n(filler), &n(sup))
            }
            ElAxiom::RoleSub { sub, sup } => ElAxiom::role_sub(&n(sub), &n(sup)),
            ElAxiom::RoleChain { first, second, sup } => {
                ElAxiom::role_chain(&n(first), &n(second), &n(sup))
            }
        }
    }
}

impl fmt::Display for ElAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElAxiom::Sub { sub, sup } => write!(f, "{sub} {SUBSUMED} {sup}"),
            ElAxiom::SubConj { left, right, sup } => {
                write!(f, "{left} {AND} {right} {SUBSUMED} {sup}")
            }
            ElAxiom::SubExists { sub, role, filler } => {
                write!(f, "{sub} {SUBSUMED} {EXISTS} {role} {DOT} {filler}")
            }
            ElAxiom::ExistsSub { role, filler, sup } => {
                write!(f, "{EXISTS} {role} {DOT} {filler} {SUBSUMED} {sup}")
            }
            ElAxiom::RoleSub { sub, sup } => write!(f, "{sub} {ROLE_SUBSUMED} {sup}"),
            ElAxiom::RoleChain { first, second, sup } => {
                write!(f, "{first} {COMPOSE} {second} {SUBSUMED} {sup}")
            }
        }
    }
}

/// Canonical single-spaced text of an axiom.
pub fn serialize_el_axiom(ax: &ElAxiom) -> String {
    ax.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElParseError {
    /// `position` is the 1-based index of the offending token; one past the
    /// last token for truncated input.
    #[error("syntax error at token {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("not in normal form: {0}")]
    NotNormalForm(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ElParseError>,
    },
}

/// General class expression, only used while parsing.
#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Atom(String),
    And(Vec<Expr>),
    Exists(String, Box<Expr>),
}

struct Cursor<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).copied()
    }

    fn error(&self, expected: &str) -> ElParseError {
        ElParseError::Syntax {
            position: self.pos + 1,
            expected: expected.to_string(),
            found: self
                .peek()
                .map(|t| format!("{t:?}"))
                .unwrap_or_else(|| "end of line".to_string()),
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ElParseError> {
        if self.peek() == Some(token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("{token:?}")))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ElParseError> {
        match self.peek() {
            Some(t) if is_valid_name(t) => {
                self.pos += 1;
                Ok(t.to_string())
            }
            _ => Err(self.error(what)),
        }
    }

    fn conjunction(&mut self) -> Result<Expr, ElParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(AND) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Expr, ElParseError> {
        if self.peek() == Some(EXISTS) {
            self.pos += 1;
            let role = self.name("role name")?;
            self.expect(DOT)?;
            let filler = self.unary()?;
            Ok(Expr::Exists(role, Box::new(filler)))
        } else {
            Ok(Expr::Atom(self.name("concept name or \"EX\"")?))
        }
    }
}

/// Parses one axiom in the ASCII surface syntax.
pub fn parse_el_axiom(line: &str) -> Result<ElAxiom, ElParseError> {
    let mut cur = Cursor {
        tokens: line.split_whitespace().collect(),
        pos: 0,
    };
    let lhs = cur.conjunction()?;
    let axiom = match cur.peek() {
        Some(COMPOSE) => {
            let first = atom_name(&lhs, "role chain")?;
            let mut chain = vec![first];
            while cur.peek() == Some(COMPOSE) {
                cur.pos += 1;
                chain.push(cur.name("role name")?);
            }
            cur.expect(SUBSUMED)?;
            let sup = cur.name("role name")?;
            if chain.len() != 2 {
                return Err(ElParseError::NotNormalForm(format!(
                    "role chain of length {}",
                    chain.len()
                )));
            }
            ElAxiom::role_chain(&chain[0], &chain[1], &sup)
        }
        Some(ROLE_SUBSUMED) => {
            let sub = atom_name(&lhs, "role inclusion")?;
            cur.pos += 1;
            let sup = cur.name("role name")?;
            ElAxiom::role_sub(&sub, &sup)
        }
        _ => {
            cur.expect(SUBSUMED)?;
            let rhs = cur.conjunction()?;
            classify(lhs, rhs)?
        }
    };
    if cur.peek().is_some() {
        return Err(cur.error("end of line"));
    }
    Ok(axiom)
}

fn atom_name(e: &Expr, ctx: &str) -> Result<String, ElParseError> {
    match e {
        Expr::Atom(a) => Ok(a.clone()),
        _ => Err(ElParseError::NotNormalForm(format!(
            "complex class expression in {ctx}"
        ))),
    }
}

fn classify(lhs: Expr, rhs: Expr) -> Result<ElAxiom, ElParseError> {
    use Expr::*;
    let not_normal = || ElParseError::NotNormalForm(format!("{lhs:?} <= {rhs:?}"));
    match (&lhs, &rhs) {
        (Atom(c), Atom(d)) => Ok(ElAxiom::sub(c, d)),
        (And(parts), Atom(d)) => match parts.as_slice() {
            [Atom(a), Atom(b)] => Ok(ElAxiom::sub_conj(a, b, d)),
            _ => Err(not_normal()),
        },
        (Atom(c), Exists(r, filler)) => match filler.as_ref() {
            Atom(d) => Ok(ElAxiom::sub_exists(c, r, d)),
            _ => Err(not_normal()),
        },
        (Exists(r, filler), Atom(d)) => match filler.as_ref() {
            Atom(c) => Ok(ElAxiom::exists_sub(r, c, d)),
            _ => Err(not_normal()),
        },
        _ => Err(not_normal()),
    }
}

/// An EL+ knowledge base: axioms in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ElKb {
    axioms: Vec<ElAxiom>,
}

impl ElKb {
    pub fn new(axioms: Vec<ElAxiom>) -> Self {
        Self { axioms }
    }

    /// Axioms in source order, duplicates included.
    pub fn axioms(&self) -> &[ElAxiom] {
        &self.axioms
    }

    pub fn axiom_set(&self) -> HashSet<ElAxiom> {
        self.axioms.iter().cloned().collect()
    }

    /// Source order with later duplicates dropped.
    pub fn distinct_axioms(&self) -> Vec<ElAxiom> {
        let mut seen = HashSet::new();
        self.axioms
            .iter()
            .filter(|a| seen.insert(*a))
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Self {
        Self::new(self.axioms.iter().map(|a| a.rename(&mut f)).collect())
    }

    /// Parses `.elp` text: one axiom per line, `#` comments and blank lines
    /// skipped.
    pub fn parse(text: &str) -> Result<Self, ElParseError> {
        let mut axioms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let ax = parse_el_axiom(trimmed).map_err(|e| ElParseError::AtLine {
                line: i + 1,
                source: Box::new(e),
            })?;
            axioms.push(ax);
        }
        Ok(Self::new(axioms))
    }

    /// `.elp` text with each distinct axiom once, in source order.
    pub fn to_elp(&self) -> String {
        let mut out = String::new();
        for ax in self.distinct_axioms() {
            out.push_str(&ax.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromIterator<ElAxiom> for ElKb {
    fn from_iter<I: IntoIterator<Item = ElAxiom>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
