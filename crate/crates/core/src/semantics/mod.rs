//! Finite interpretations, evaluation, model extraction and the
//! brute-force oracle.
//!
//! Domain elements are `0..domain_size`. Symbols missing from a [`Model`]
//! have empty extensions. Evaluation covers the full surface syntax,
//! including the defined operators and the restriction operators.

mod extract;
mod fo;
mod io;
mod oracle;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Concept, Role};

pub use extract::{check_reflection, extract_model, ExtractError, Extraction};
pub use fo::{eval_fo, sentence, st_role, st_translate, Formula, Term, Var};
pub use io::{parse_model, write_model, ModelFormatError};
pub use oracle::{enumerate_model, model_of_size};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("individual `{0}` has no value in the model")]
    UnboundIndividual(String),
    #[error("variable {0} is free")]
    FreeVariable(Var),
    #[error("model has an empty domain")]
    EmptyDomain,
    #[error("element {element} is outside a domain of size {size}")]
    OutOfDomain { element: usize, size: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub domain_size: usize,
    pub concepts: BTreeMap<String, BTreeSet<usize>>,
    pub roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub individuals: BTreeMap<String, usize>,
}

impl Model {
    pub fn new(domain_size: usize) -> Model {
        Model {
            domain_size,
            ..Model::default()
        }
    }

    pub fn with_concept(mut self, name: &str, elems: impl IntoIterator<Item = usize>) -> Model {
        self.concepts
            .entry(name.to_string())
            .or_default()
            .extend(elems);
        self
    }

    pub fn with_role(
        mut self,
        name: &str,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Model {
        self.roles
            .entry(name.to_string())
            .or_default()
            .extend(pairs);
        self
    }

    pub fn with_individual(mut self, name: &str, elem: usize) -> Model {
        self.individuals.insert(name.to_string(), elem);
        self
    }

    /// Checks the domain is nonempty and every element mentioned lies in it.
    pub fn validate(&self) -> Result<(), SemanticsError> {
        if self.domain_size == 0 {
            return Err(SemanticsError::EmptyDomain);
        }
        let size = self.domain_size;
        let check = |element: usize| {
            if element < size {
                Ok(())
            } else {
                Err(SemanticsError::OutOfDomain { element, size })
            }
        };
        for &e in self.concepts.values().flatten() {
            check(e)?;
        }
        for &(a, b) in self.roles.values().flatten() {
            check(a)?;
            check(b)?;
        }
        for &e in self.individuals.values() {
            check(e)?;
        }
        Ok(())
    }

    pub fn individual(&self, name: &str) -> Result<usize, SemanticsError> {
        self.individuals
            .get(name)
            .copied()
            .ok_or_else(|| SemanticsError::UnboundIndividual(name.to_string()))
    }

    pub fn concept_holds(&self, name: &str, e: usize) -> bool {
        self.concepts.get(name).is_some_and(|s| s.contains(&e))
    }

    pub fn role_holds(&self, name: &str, x: usize, y: usize) -> bool {
        self.roles.get(name).is_some_and(|s| s.contains(&(x, y)))
    }
}

pub fn eval_concept(m: &Model, c: &Concept) -> Result<BTreeSet<usize>, SemanticsError> {
    m.validate()?;
    let ext = Eval {
        m,
        n: m.domain_size,
    }
    .concept(c)?;
    Ok(members(&ext))
}

pub fn eval_role(m: &Model, r: &Role) -> Result<BTreeSet<(usize, usize)>, SemanticsError> {
    m.validate()?;
    let n = m.domain_size;
    let ext = Eval { m, n }.role(r)?;
    Ok((0..n * n)
        .filter(|&i| ext[i])
        .map(|i| (i / n, i % n))
        .collect())
}

/// `c` has a nonempty extension in `m`.
pub fn satisfied(m: &Model, c: &Concept) -> Result<bool, SemanticsError> {
    Ok(!eval_concept(m, c)?.is_empty())
}

fn members(ext: &[bool]) -> BTreeSet<usize> {
    ext.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect()
}

/// Unary extensions are `n` flags; binary ones are `n * n` flags, row-major.
struct Eval<'a> {
    m: &'a Model,
    n: usize,
}

type Ext = Vec<bool>;

impl Eval<'_> {
    fn concept(&self, c: &Concept) -> Result<Ext, SemanticsError> {
        let n = self.n;
        Ok(match c {
            Concept::Atomic(a) => (0..n).map(|e| self.m.concept_holds(a, e)).collect(),
            Concept::Singleton(a) => {
                let v = self.m.individual(a)?;
                (0..n).map(|e| e == v).collect()
            }
            Concept::Not(c) => self.concept(c)?.into_iter().map(|b| !b).collect(),
            Concept::Or(a, b) => zip(self.concept(a)?, self.concept(b)?, |x, y| x || y),
            Concept::And(a, b) => zip(self.concept(a)?, self.concept(b)?, |x, y| x && y),
            Concept::Top => vec![true; n],
            Concept::Bottom => vec![false; n],
            Concept::Exists(r, c) => {
                let (r, c) = (self.role(r)?, self.concept(c)?);
                (0..n)
                    .map(|x| (0..n).any(|y| r[x * n + y] && c[y]))
                    .collect()
            }
            Concept::Forall(r, c) => {
                let (r, c) = (self.role(r)?, self.concept(c)?);
                (0..n)
                    .map(|x| (0..n).all(|y| !r[x * n + y] || c[y]))
                    .collect()
            }
            Concept::Window(r, c) => {
                let (r, c) = (self.role(r)?, self.concept(c)?);
                (0..n)
                    .map(|x| (0..n).all(|y| !c[y] || r[x * n + y]))
                    .collect()
            }
            Concept::Box(c) => {
                let all = self.concept(c)?.into_iter().all(|b| b);
                vec![all; n]
            }
            Concept::Assertion(a, c) => {
                let v = self.m.individual(a)?;
                vec![self.concept(c)?[v]; n]
            }
            Concept::RoleAssertion(a, b, r) => {
                let (x, y) = (self.m.individual(a)?, self.m.individual(b)?);
                vec![self.role(r)?[x * n + y]; n]
            }
            Concept::Incl(a, b) => {
                let holds = zip(self.concept(a)?, self.concept(b)?, |x, y| !x || y)
                    .into_iter()
                    .all(|b| b);
                vec![holds; n]
            }
            Concept::RIncl(r, s) => {
                let holds = zip(self.role(r)?, self.role(s)?, |x, y| !x || y)
                    .into_iter()
                    .all(|b| b);
                vec![holds; n]
            }
        })
    }

    fn role(&self, r: &Role) -> Result<Ext, SemanticsError> {
        let n = self.n;
        let pairs = |f: &dyn Fn(usize, usize) -> bool| -> Ext {
            (0..n * n).map(|i| f(i / n, i % n)).collect()
        };
        Ok(match r {
            Role::Atomic(q) => pairs(&|x, y| self.m.role_holds(q, x, y)),
            Role::Id => pairs(&|x, y| x == y),
            Role::Div => pairs(&|x, y| x != y),
            Role::Top => vec![true; n * n],
            Role::Bottom => vec![false; n * n],
            Role::Or(a, b) => zip(self.role(a)?, self.role(b)?, |x, y| x || y),
            Role::And(a, b) => zip(self.role(a)?, self.role(b)?, |x, y| x && y),
            Role::Not(r) => self.role(r)?.into_iter().map(|b| !b).collect(),
            Role::Inverse(r) => {
                let r = self.role(r)?;
                pairs(&|x, y| r[y * n + x])
            }
            Role::Test(c) => {
                let c = self.concept(c)?;
                pairs(&|x, y| x == y && c[x])
            }
            Role::DomRestrict(r, c) => {
                let (r, c) = (self.role(r)?, self.concept(c)?);
                pairs(&|x, y| r[x * n + y] && c[x])
            }
            Role::RanRestrict(r, c) => {
                let (r, c) = (self.role(r)?, self.concept(c)?);
                pairs(&|x, y| r[x * n + y] && c[y])
            }
            Role::LeftCyl(c) => {
                let c = self.concept(c)?;
                pairs(&|x, _| c[x])
            }
            Role::RightCyl(c) => {
                let c = self.concept(c)?;
                pairs(&|_, y| c[y])
            }
            Role::Cross(a, b) => {
                let (a, b) = (self.concept(a)?, self.concept(b)?);
                pairs(&|x, y| a[x] && b[y])
            }
        })
    }
}

fn zip(a: Ext, b: Ext, f: impl Fn(bool, bool) -> bool) -> Ext {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

#[cfg(test)]
mod tests;
