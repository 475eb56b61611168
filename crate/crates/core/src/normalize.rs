//! Rewriting of sugared input into the core language.
//!
//! The pipeline is `desugar`, then `encode_restriction_ops`, then
//! internalization of all statements and definitions into one concept, and
//! finally `push_inverse`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::syntax::{Concept, ConceptInclusion, Problem, Role};

/// Concept symbol used to spell out the top concept.
pub const TOP_SYMBOL: &str = "$top";
/// Role symbol used to spell out the universal role.
pub const UNIVERSAL_SYMBOL: &str = "$univ";
const CYLINDER_PREFIX: &str = "$cyl";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("problem has no goal concept")]
    EmptyProblem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInput {
    pub concept: Concept,
    /// Fresh role symbol to the concept whose left cylinder it stands for.
    pub fresh_roles: BTreeMap<String, Concept>,
}

fn top() -> Concept {
    let a = Concept::atom(TOP_SYMBOL);
    Concept::or(a.clone(), Concept::not(a))
}

fn bottom() -> Concept {
    Concept::not(top())
}

fn universal() -> Role {
    let q = Role::atom(UNIVERSAL_SYMBOL);
    Role::or(q.clone(), Role::not(q))
}

fn and(a: Concept, b: Concept) -> Concept {
    Concept::not(Concept::or(Concept::not(a), Concept::not(b)))
}

fn role_and(r: Role, s: Role) -> Role {
    Role::not(Role::or(Role::not(r), Role::not(s)))
}

fn forall(r: Role, c: Concept) -> Concept {
    Concept::not(Concept::exists(r, Concept::not(c)))
}

fn always(c: Concept) -> Concept {
    forall(universal(), c)
}

fn b(c: Concept) -> Box<Concept> {
    Box::new(c)
}

/// Rewrites every sugared concept and role node into core constructors.
///
/// Restriction-family role operators (`test`, `dom`, `ran`, `lcyl`, `rcyl`,
/// `cross`) have no equivalent core form; they are kept, with their
/// arguments desugared, for [`encode_restriction_ops`].
pub fn desugar(c: &Concept) -> Concept {
    match c {
        Concept::Atomic(_) | Concept::Singleton(_) => c.clone(),
        Concept::Not(c) => Concept::not(desugar(c)),
        Concept::Or(x, y) => Concept::or(desugar(x), desugar(y)),
        Concept::Exists(r, c) => Concept::exists(desugar_role(r), desugar(c)),
        Concept::Top => top(),
        Concept::Bottom => bottom(),
        Concept::And(x, y) => and(desugar(x), desugar(y)),
        Concept::Forall(r, c) => forall(desugar_role(r), desugar(c)),
        Concept::Window(r, c) => {
            Concept::not(Concept::exists(Role::not(desugar_role(r)), desugar(c)))
        }
        Concept::Box(c) => always(desugar(c)),
        Concept::Assertion(a, c) => {
            Concept::exists(universal(), and(Concept::singleton(a.clone()), desugar(c)))
        }
        Concept::RoleAssertion(a, a2, r) => desugar(&Concept::Assertion(
            a.clone(),
            b(Concept::exists(r.clone(), Concept::singleton(a2.clone()))),
        )),
        Concept::Incl(x, y) => always(Concept::or(Concept::not(desugar(x)), desugar(y))),
        Concept::RIncl(r, s) => always(forall(
            Role::not(Role::or(Role::not(desugar_role(r)), desugar_role(s))),
            bottom(),
        )),
    }
}

pub fn desugar_role(r: &Role) -> Role {
    match r {
        Role::Atomic(_) | Role::Id => r.clone(),
        Role::Or(x, y) => Role::or(desugar_role(x), desugar_role(y)),
        Role::Not(x) => Role::not(desugar_role(x)),
        Role::Inverse(x) => Role::inverse(desugar_role(x)),
        Role::Top => universal(),
        Role::Bottom => Role::not(universal()),
        Role::And(x, y) => role_and(desugar_role(x), desugar_role(y)),
        Role::Div => Role::not(Role::Id),
        Role::Test(c) => Role::Test(b(desugar(c))),
        Role::DomRestrict(x, c) => Role::DomRestrict(Box::new(desugar_role(x)), b(desugar(c))),
        Role::RanRestrict(x, c) => Role::RanRestrict(Box::new(desugar_role(x)), b(desugar(c))),
        Role::LeftCyl(c) => Role::LeftCyl(b(desugar(c))),
        Role::RightCyl(c) => Role::RightCyl(b(desugar(c))),
        Role::Cross(x, y) => Role::Cross(b(desugar(x)), b(desugar(y))),
    }
}

/// Replaces restriction-family operators by fresh role symbols. One symbol
/// `Q_D` is introduced per distinct cylinder concept `D`, defined by
/// `not D <= all Q_D . bot` and `D <= win Q_D . top`.
#[derive(Debug, Default)]
pub struct RestrictionEncoder {
    names: HashMap<Concept, String>,
    fresh: BTreeMap<String, Concept>,
    definitions: Vec<ConceptInclusion>,
}

impl RestrictionEncoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn encode(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Atomic(_) | Concept::Singleton(_) | Concept::Top | Concept::Bottom => {
                c.clone()
            }
            Concept::Not(x) => Concept::not(self.encode(x)),
            Concept::Box(x) => Concept::always(self.encode(x)),
            Concept::Or(x, y) => Concept::or(self.encode(x), self.encode(y)),
            Concept::And(x, y) => Concept::and(self.encode(x), self.encode(y)),
            Concept::Incl(x, y) => Concept::Incl(b(self.encode(x)), b(self.encode(y))),
            Concept::Exists(r, x) => Concept::exists(self.encode_role(r), self.encode(x)),
            Concept::Forall(r, x) => Concept::forall(self.encode_role(r), self.encode(x)),
            Concept::Window(r, x) => Concept::window(self.encode_role(r), self.encode(x)),
            Concept::Assertion(a, x) => Concept::Assertion(a.clone(), b(self.encode(x))),
            Concept::RoleAssertion(a, a2, r) => {
                Concept::RoleAssertion(a.clone(), a2.clone(), self.encode_role(r))
            }
            Concept::RIncl(r, s) => Concept::RIncl(self.encode_role(r), self.encode_role(s)),
        }
    }

    pub fn encode_role(&mut self, r: &Role) -> Role {
        match r {
            Role::Atomic(_) | Role::Id | Role::Top | Role::Bottom | Role::Div => r.clone(),
            Role::Or(x, y) => Role::or(self.encode_role(x), self.encode_role(y)),
            Role::And(x, y) => role_and(self.encode_role(x), self.encode_role(y)),
            Role::Not(x) => Role::not(self.encode_role(x)),
            Role::Inverse(x) => Role::inverse(self.encode_role(x)),
            Role::LeftCyl(d) => self.cylinder(d),
            Role::RightCyl(d) => Role::inverse(self.cylinder(d)),
            Role::DomRestrict(x, d) => {
                let x = self.encode_role(x);
                role_and(x, self.cylinder(d))
            }
            Role::RanRestrict(x, d) => {
                let x = self.encode_role(x);
                role_and(x, Role::inverse(self.cylinder(d)))
            }
            Role::Test(d) => role_and(Role::Id, Role::inverse(self.cylinder(d))),
            Role::Cross(x, y) => {
                let left = self.cylinder(x);
                role_and(left, Role::inverse(self.cylinder(y)))
            }
        }
    }

    fn cylinder(&mut self, d: &Concept) -> Role {
        let d = desugar(&self.encode(d));
        if let Some(name) = self.names.get(&d) {
            return Role::atom(name.clone());
        }
        let name = format!("{CYLINDER_PREFIX}{}", self.fresh.len());
        let q = Role::atom(name.clone());
        self.definitions.push(ConceptInclusion {
            sub: Concept::not(d.clone()),
            sup: forall(q.clone(), bottom()),
        });
        self.definitions.push(ConceptInclusion {
            sub: d.clone(),
            sup: Concept::not(Concept::exists(Role::not(q.clone()), top())),
        });
        self.names.insert(d.clone(), name.clone());
        self.fresh.insert(name, d);
        q
    }

    pub fn definitions(&self) -> &[ConceptInclusion] {
        &self.definitions
    }

    pub fn fresh_roles(&self) -> &BTreeMap<String, Concept> {
        &self.fresh
    }
}

/// Encodes every restriction-family operator in `c`, returning the rewritten
/// concept and the definitions of the fresh symbols.
pub fn encode_restriction_ops(c: &Concept) -> (Concept, Vec<ConceptInclusion>) {
    let mut enc = RestrictionEncoder::new();
    let out = desugar(&enc.encode(c));
    (out, enc.definitions)
}

/// Goals conjoined with every statement of the knowledge base, still in
/// sugared form. With `una`, adds `{a} and {b} <= bot` for each pair of
/// distinct individuals.
pub fn conjoin_problem(p: &Problem) -> Result<Concept, NormalizeError> {
    if p.goals.is_empty() {
        return Err(NormalizeError::EmptyProblem);
    }
    let mut parts: Vec<Concept> = p.goals.clone();
    parts.extend(p.statements());
    if p.una {
        let inds = p.individuals();
        for (i, a) in inds.iter().enumerate() {
            for a2 in &inds[i + 1..] {
                parts.push(Concept::Incl(
                    b(Concept::and(
                        Concept::singleton(a.clone()),
                        Concept::singleton(a2.clone()),
                    )),
                    b(Concept::Bottom),
                ));
            }
        }
    }
    Ok(Concept::and_all(parts).expect("at least one goal"))
}

/// Single concept equisatisfiable with the problem, desugared.
pub fn internalize(p: &Problem) -> Result<Concept, NormalizeError> {
    Ok(desugar(&conjoin_problem(p)?))
}

pub fn push_inverse(c: &Concept) -> Concept {
    match c {
        Concept::Atomic(_) | Concept::Singleton(_) => c.clone(),
        Concept::Not(x) => Concept::not(push_inverse(x)),
        Concept::Or(x, y) => Concept::or(push_inverse(x), push_inverse(y)),
        Concept::Exists(r, x) => Concept::exists(push_role(r, false), push_inverse(x)),
        Concept::Top => Concept::Top,
        Concept::Bottom => Concept::Bottom,
        Concept::And(x, y) => Concept::and(push_inverse(x), push_inverse(y)),
        Concept::Forall(r, x) => Concept::forall(push_role(r, false), push_inverse(x)),
        Concept::Window(r, x) => Concept::window(push_role(r, false), push_inverse(x)),
        Concept::Box(x) => Concept::always(push_inverse(x)),
        Concept::Assertion(a, x) => Concept::Assertion(a.clone(), b(push_inverse(x))),
        Concept::RoleAssertion(a, a2, r) => {
            Concept::RoleAssertion(a.clone(), a2.clone(), push_role(r, false))
        }
        Concept::Incl(x, y) => Concept::Incl(b(push_inverse(x)), b(push_inverse(y))),
        Concept::RIncl(r, s) => Concept::RIncl(push_role(r, false), push_role(s, false)),
    }
}

/// Pushes inverse through a role; `inverted` says whether an odd number of
/// inverses sits above `r`.
pub fn push_role(r: &Role, inverted: bool) -> Role {
    let wrap = |r: Role| if inverted { Role::inverse(r) } else { r };
    match r {
        Role::Atomic(_) => wrap(r.clone()),
        Role::Id | Role::Top | Role::Bottom | Role::Div => r.clone(),
        Role::Or(x, y) => Role::or(push_role(x, inverted), push_role(y, inverted)),
        Role::And(x, y) => Role::and(push_role(x, inverted), push_role(y, inverted)),
        Role::Not(x) => Role::not(push_role(x, inverted)),
        Role::Inverse(x) => push_role(x, !inverted),
        Role::Test(c) => Role::Test(b(push_inverse(c))),
        Role::Cross(x, y) if inverted => Role::Cross(b(push_inverse(y)), b(push_inverse(x))),
        Role::Cross(x, y) => Role::Cross(b(push_inverse(x)), b(push_inverse(y))),
        Role::LeftCyl(c) if inverted => Role::RightCyl(b(push_inverse(c))),
        Role::LeftCyl(c) => Role::LeftCyl(b(push_inverse(c))),
        Role::RightCyl(c) if inverted => Role::LeftCyl(b(push_inverse(c))),
        Role::RightCyl(c) => Role::RightCyl(b(push_inverse(c))),
        Role::DomRestrict(x, c) if inverted => {
            Role::RanRestrict(Box::new(push_role(x, true)), b(push_inverse(c)))
        }
        Role::DomRestrict(x, c) => {
            Role::DomRestrict(Box::new(push_role(x, false)), b(push_inverse(c)))
        }
        Role::RanRestrict(x, c) if inverted => {
            Role::DomRestrict(Box::new(push_role(x, true)), b(push_inverse(c)))
        }
        Role::RanRestrict(x, c) => {
            Role::RanRestrict(Box::new(push_role(x, false)), b(push_inverse(c)))
        }
    }
}

/// Full pipeline: the result is in core syntax with atomic-only inverse.
pub fn normalize(p: &Problem) -> Result<NormalizedInput, NormalizeError> {
    let conjoined = internalize(p)?;
    let mut enc = RestrictionEncoder::new();
    let encoded = desugar(&enc.encode(&conjoined));
    let mut parts = vec![encoded];
    parts.extend(enc.definitions.iter().map(|d| desugar(&d.to_concept())));
    let concept = Concept::and_all(parts).expect("nonempty");
    Ok(NormalizedInput {
        concept: push_inverse(&desugar(&concept)),
        fresh_roles: enc.fresh,
    })
}

/// Normalizes a single concept with an empty knowledge base.
pub fn normalize_concept(c: &Concept) -> NormalizedInput {
    normalize(&Problem::from_goal(c.clone())).expect("goal present")
}
