//! Abstract syntax of ALBO^id concepts and roles, plus the problem format.
//!
//! The core language has five concept constructors (atoms, singletons,
//! negation, union, existential restriction) and five role constructors
//! (atoms, identity, union, negation, inverse). Everything else is sugar
//! that `normalize` rewrites away.

mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::{parse_concept, parse_problem, parse_role, ParseError};
pub use printer::{print_concept, print_role};

/// Prefix reserved for symbols introduced by normalization. The lexer never
/// produces identifiers starting with it.
pub const RESERVED_PREFIX: char = '$';

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Atomic(String),
    Singleton(String),
    Not(Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(Role, Box<Concept>),
    // sugar
    Top,
    Bottom,
    And(Box<Concept>, Box<Concept>),
    Forall(Role, Box<Concept>),
    /// Sufficiency operator: every element of the filler is a successor.
    Window(Role, Box<Concept>),
    /// Universal modality.
    Box(Box<Concept>),
    Assertion(String, Box<Concept>),
    RoleAssertion(String, String, Role),
    Incl(Box<Concept>, Box<Concept>),
    RIncl(Role, Role),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Atomic(String),
    Id,
    Or(Box<Role>, Box<Role>),
    Not(Box<Role>),
    Inverse(Box<Role>),
    // sugar
    Top,
    Bottom,
    And(Box<Role>, Box<Role>),
    Div,
    Test(Box<Concept>),
    DomRestrict(Box<Role>, Box<Concept>),
    RanRestrict(Box<Role>, Box<Concept>),
    LeftCyl(Box<Concept>),
    RightCyl(Box<Concept>),
    Cross(Box<Concept>, Box<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Concept {
        Concept::Atomic(name.into())
    }

    pub fn singleton(name: impl Into<String>) -> Concept {
        Concept::Singleton(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Concept {
        Concept::Not(Box::new(c))
    }

    pub fn or(a: Concept, b: Concept) -> Concept {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Concept, b: Concept) -> Concept {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn exists(r: Role, c: Concept) -> Concept {
        Concept::Exists(r, Box::new(c))
    }

    pub fn forall(r: Role, c: Concept) -> Concept {
        Concept::Forall(r, Box::new(c))
    }

    pub fn window(r: Role, c: Concept) -> Concept {
        Concept::Window(r, Box::new(c))
    }

    pub fn always(c: Concept) -> Concept {
        Concept::Box(Box::new(c))
    }

    /// Right-nested conjunction of `items`; `None` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Concept>) -> Option<Concept> {
        let mut items: Vec<Concept> = items.into_iter().collect();
        let mut acc = items.pop()?;
        while let Some(c) = items.pop() {
            acc = Concept::and(c, acc);
        }
        Some(acc)
    }

    /// True if the concept uses only the five core constructors and its
    /// roles only the five core role constructors.
    pub fn is_core(&self) -> bool {
        match self {
            Concept::Atomic(_) | Concept::Singleton(_) => true,
            Concept::Not(c) => c.is_core(),
            Concept::Or(a, b) => a.is_core() && b.is_core(),
            Concept::Exists(r, c) => r.is_core() && c.is_core(),
            _ => false,
        }
    }

    /// Core syntax where every inverse wraps an atomic role.
    pub fn is_normalized(&self) -> bool {
        match self {
            Concept::Atomic(_) | Concept::Singleton(_) => true,
            Concept::Not(c) => c.is_normalized(),
            Concept::Or(a, b) => a.is_normalized() && b.is_normalized(),
            Concept::Exists(r, c) => r.is_normalized() && c.is_normalized(),
            _ => false,
        }
    }

    /// Direct subterms (concepts only).
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Atomic(_)
            | Concept::Singleton(_)
            | Concept::Top
            | Concept::Bottom
            | Concept::RoleAssertion(..)
            | Concept::RIncl(..) => Vec::new(),
            Concept::Not(c) | Concept::Box(c) | Concept::Assertion(_, c) => vec![c],
            Concept::Exists(_, c) | Concept::Forall(_, c) | Concept::Window(_, c) => vec![c],
            Concept::Or(a, b) | Concept::And(a, b) | Concept::Incl(a, b) => vec![a, b],
        }
    }

    /// Calls `f` on every identifier occurrence with its alphabet.
    pub fn visit_symbols(&self, f: &mut impl FnMut(&str, SymbolKind)) {
        match self {
            Concept::Atomic(n) => f(n, SymbolKind::Concept),
            Concept::Singleton(a) => f(a, SymbolKind::Individual),
            Concept::Not(c) | Concept::Box(c) => c.visit_symbols(f),
            Concept::Or(a, b) | Concept::And(a, b) | Concept::Incl(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
            Concept::Exists(r, c) | Concept::Forall(r, c) | Concept::Window(r, c) => {
                r.visit_symbols(f);
                c.visit_symbols(f);
            }
            Concept::Top | Concept::Bottom => {}
            Concept::Assertion(a, c) => {
                f(a, SymbolKind::Individual);
                c.visit_symbols(f);
            }
            Concept::RoleAssertion(a, b, r) => {
                f(a, SymbolKind::Individual);
                f(b, SymbolKind::Individual);
                r.visit_symbols(f);
            }
            Concept::RIncl(r, s) => {
                r.visit_symbols(f);
                s.visit_symbols(f);
            }
        }
    }

    /// Distinct individual names in order of first (pre-order) occurrence.
    pub fn individuals(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_symbols(&mut |name, kind| {
            if kind == SymbolKind::Individual && seen.insert(name.to_string()) {
                out.push(name.to_string());
            }
        });
        out
    }

    pub fn symbols(&self, kind: SymbolKind) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_symbols(&mut |name, k| {
            if k == kind {
                out.insert(name.to_string());
            }
        });
        out
    }
}

impl Role {
    pub fn atom(name: impl Into<String>) -> Role {
        Role::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(r: Role) -> Role {
        Role::Not(Box::new(r))
    }

    pub fn or(a: Role, b: Role) -> Role {
        Role::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Role, b: Role) -> Role {
        Role::And(Box::new(a), Box::new(b))
    }

    pub fn inverse(r: Role) -> Role {
        Role::Inverse(Box::new(r))
    }

    pub fn is_core(&self) -> bool {
        match self {
            Role::Atomic(_) | Role::Id => true,
            Role::Or(a, b) => a.is_core() && b.is_core(),
            Role::Not(r) | Role::Inverse(r) => r.is_core(),
            _ => false,
        }
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            Role::Atomic(_) | Role::Id => true,
            Role::Or(a, b) => a.is_normalized() && b.is_normalized(),
            Role::Not(r) => r.is_normalized(),
            Role::Inverse(r) => matches!(**r, Role::Atomic(_)),
            _ => false,
        }
    }

    pub fn visit_symbols(&self, f: &mut impl FnMut(&str, SymbolKind)) {
        match self {
            Role::Atomic(n) => f(n, SymbolKind::Role),
            Role::Id | Role::Top | Role::Bottom | Role::Div => {}
            Role::Or(a, b) | Role::And(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
            Role::Not(r) | Role::Inverse(r) => r.visit_symbols(f),
            Role::Test(c) | Role::LeftCyl(c) | Role::RightCyl(c) => c.visit_symbols(f),
            Role::DomRestrict(r, c) | Role::RanRestrict(r, c) => {
                r.visit_symbols(f);
                c.visit_symbols(f);
            }
            Role::Cross(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Individual,
    Concept,
    Role,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Individual => "individual",
            SymbolKind::Concept => "concept symbol",
            SymbolKind::Role => "role symbol",
        })
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_concept(self))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_role(self))
    }
}

/// Number of AST nodes: every operator, symbol occurrence and individual
/// occurrence counts one. `{a}` is two (the braces and `a`).
pub fn length(c: &Concept) -> usize {
    match c {
        Concept::Atomic(_) | Concept::Top | Concept::Bottom => 1,
        Concept::Singleton(_) => 2,
        Concept::Not(c) | Concept::Box(c) => 1 + length(c),
        Concept::Or(a, b) | Concept::And(a, b) | Concept::Incl(a, b) => 1 + length(a) + length(b),
        Concept::Exists(r, c) | Concept::Forall(r, c) | Concept::Window(r, c) => {
            1 + role_length(r) + length(c)
        }
        Concept::Assertion(_, c) => 2 + length(c),
        Concept::RoleAssertion(_, _, r) => 3 + role_length(r),
        Concept::RIncl(r, s) => 1 + role_length(r) + role_length(s),
    }
}

pub fn role_length(r: &Role) -> usize {
    match r {
        Role::Atomic(_) | Role::Id | Role::Top | Role::Bottom | Role::Div => 1,
        Role::Or(a, b) | Role::And(a, b) => 1 + role_length(a) + role_length(b),
        Role::Not(r) | Role::Inverse(r) => 1 + role_length(r),
        Role::Test(c) | Role::LeftCyl(c) | Role::RightCyl(c) => 1 + length(c),
        Role::DomRestrict(r, c) | Role::RanRestrict(r, c) => 1 + role_length(r) + length(c),
        Role::Cross(a, b) => 1 + length(a) + length(b),
    }
}

/// Distinct individuals in `c` plus one for the root label of the tableau.
pub fn count_individuals(c: &Concept) -> usize {
    c.individuals().len() + 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptInclusion {
    pub sub: Concept,
    pub sup: Concept,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleInclusion {
    pub sub: Role,
    pub sup: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assertion {
    Concept {
        individual: String,
        concept: Concept,
    },
    Role {
        subject: String,
        object: String,
        role: Role,
    },
}

impl ConceptInclusion {
    pub fn to_concept(&self) -> Concept {
        Concept::Incl(Box::new(self.sub.clone()), Box::new(self.sup.clone()))
    }
}

impl RoleInclusion {
    pub fn to_concept(&self) -> Concept {
        Concept::RIncl(self.sub.clone(), self.sup.clone())
    }
}

impl Assertion {
    pub fn to_concept(&self) -> Concept {
        match self {
            Assertion::Concept {
                individual,
                concept,
            } => Concept::Assertion(individual.clone(), Box::new(concept.clone())),
            Assertion::Role {
                subject,
                object,
                role,
            } => Concept::RoleAssertion(subject.clone(), object.clone(), role.clone()),
        }
    }
}

/// A satisfiability question: goal concepts with respect to a knowledge base.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Problem {
    pub goals: Vec<Concept>,
    pub tbox: Vec<ConceptInclusion>,
    pub rbox: Vec<RoleInclusion>,
    pub abox: Vec<Assertion>,
    /// Unique name assumption. Off unless the input asks for it.
    pub una: bool,
}

impl Problem {
    pub fn from_goal(goal: Concept) -> Problem {
        Problem {
            goals: vec![goal],
            ..Problem::default()
        }
    }

    /// Knowledge base statements as (sugared) concepts, in input order.
    pub fn statements(&self) -> Vec<Concept> {
        self.tbox
            .iter()
            .map(ConceptInclusion::to_concept)
            .chain(self.rbox.iter().map(RoleInclusion::to_concept))
            .chain(self.abox.iter().map(Assertion::to_concept))
            .collect()
    }

    /// Distinct individuals over goals and statements, first occurrence order.
    pub fn individuals(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in self.goals.iter().cloned().chain(self.statements()) {
            for a in c.individuals() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }
}
