use std::collections::HashMap;

use crate::syntax::{Concept, Role};

use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleId(pub u32);

/// Individual, identified by its index. Indices follow the order of
/// introduction: the root is 0, input individuals come next, witnesses
/// created by the (∃) rule after that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Individual(pub u32);

impl Individual {
    pub const ROOT: Individual = Individual(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CNode {
    Atomic(u32),
    Singleton(Individual),
    Not(ConceptId),
    Or(ConceptId, ConceptId),
    Exists(RoleId, ConceptId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RNode {
    Atomic(u32),
    Id,
    Or(RoleId, RoleId),
    Not(RoleId),
    Inverse(RoleId),
}

/// Hash-consed concepts and roles shared by all branches of a derivation.
#[derive(Debug, Clone, Default)]
pub struct Store {
    concept_names: Vec<String>,
    concept_symbols: HashMap<String, u32>,
    role_names: Vec<String>,
    role_symbols: HashMap<String, u32>,
    concepts: Vec<CNode>,
    concept_index: HashMap<CNode, ConceptId>,
    /// Individuals occurring in each concept, in order of first occurrence.
    concept_individuals: Vec<Vec<Individual>>,
    roles: Vec<RNode>,
    role_index: HashMap<RNode, RoleId>,
    input_names: Vec<String>,
    input_index: HashMap<String, Individual>,
    generated_prefix: String,
}

/// Interning policy used when computing rule conclusions: lookups during
/// applicability checks must not grow the store.
pub(crate) trait Resolve {
    fn store(&self) -> &Store;
    fn concept(&mut self, n: CNode) -> Option<ConceptId>;
}

impl Resolve for &Store {
    fn store(&self) -> &Store {
        self
    }

    fn concept(&mut self, n: CNode) -> Option<ConceptId> {
        self.lookup(n)
    }
}

impl Resolve for &mut Store {
    fn store(&self) -> &Store {
        self
    }

    fn concept(&mut self, n: CNode) -> Option<ConceptId> {
        Some(self.intern(n))
    }
}

fn looks_generated(name: &str, prefix: &str) -> bool {
    name.strip_prefix(prefix)
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

impl Store {
    /// Registers the input individuals (index 1 onward) in the given order.
    pub fn new(input_individuals: &[String]) -> Store {
        let mut prefix = String::from("a");
        while input_individuals
            .iter()
            .any(|n| looks_generated(n, &prefix))
        {
            prefix.insert(0, '_');
        }
        let mut store = Store {
            generated_prefix: prefix,
            ..Store::default()
        };
        store
            .input_names
            .push(format!("{}0", store.generated_prefix));
        for name in input_individuals {
            if !store.input_index.contains_key(name) {
                let ind = Individual(store.input_names.len() as u32);
                store.input_index.insert(name.clone(), ind);
                store.input_names.push(name.clone());
            }
        }
        store
    }

    /// Root plus input individuals.
    pub fn input_count(&self) -> u32 {
        self.input_names.len() as u32
    }

    pub fn individual_name(&self, a: Individual) -> String {
        match self.input_names.get(a.index()) {
            Some(n) => n.clone(),
            None => format!("{}{}", self.generated_prefix, a.0),
        }
    }

    pub fn input_individual(&self, name: &str) -> Option<Individual> {
        self.input_index.get(name).copied()
    }

    pub fn node(&self, c: ConceptId) -> CNode {
        self.concepts[c.0 as usize]
    }

    pub fn role(&self, r: RoleId) -> RNode {
        self.roles[r.0 as usize]
    }

    pub fn concept_name(&self, sym: u32) -> &str {
        &self.concept_names[sym as usize]
    }

    pub fn role_name(&self, sym: u32) -> &str {
        &self.role_names[sym as usize]
    }

    pub fn individuals_in(&self, c: ConceptId) -> &[Individual] {
        &self.concept_individuals[c.0 as usize]
    }

    pub fn lookup(&self, n: CNode) -> Option<ConceptId> {
        self.concept_index.get(&n).copied()
    }

    pub fn lookup_role(&self, n: RNode) -> Option<RoleId> {
        self.role_index.get(&n).copied()
    }

    pub fn intern(&mut self, n: CNode) -> ConceptId {
        if let Some(&id) = self.concept_index.get(&n) {
            return id;
        }
        let inds = match n {
            CNode::Atomic(_) => Vec::new(),
            CNode::Singleton(a) => vec![a],
            CNode::Not(c) | CNode::Exists(_, c) => self.individuals_in(c).to_vec(),
            CNode::Or(c, d) => {
                let mut v = self.individuals_in(c).to_vec();
                for &a in self.individuals_in(d) {
                    if !v.contains(&a) {
                        v.push(a);
                    }
                }
                v
            }
        };
        let id = ConceptId(self.concepts.len() as u32);
        self.concepts.push(n);
        self.concept_individuals.push(inds);
        self.concept_index.insert(n, id);
        id
    }

    pub fn intern_role(&mut self, n: RNode) -> RoleId {
        if let Some(&id) = self.role_index.get(&n) {
            return id;
        }
        let id = RoleId(self.roles.len() as u32);
        self.roles.push(n);
        self.role_index.insert(n, id);
        id
    }

    fn symbol(names: &mut Vec<String>, index: &mut HashMap<String, u32>, name: &str) -> u32 {
        if let Some(&s) = index.get(name) {
            return s;
        }
        let s = names.len() as u32;
        names.push(name.to_string());
        index.insert(name.to_string(), s);
        s
    }

    /// Interns a core-syntax concept. Individuals must have been registered.
    pub fn intern_concept(&mut self, c: &Concept) -> Result<ConceptId, EngineError> {
        let node = match c {
            Concept::Atomic(name) => CNode::Atomic(Self::symbol(
                &mut self.concept_names,
                &mut self.concept_symbols,
                name,
            )),
            Concept::Singleton(a) => {
                let ind = self
                    .input_individual(a)
                    .ok_or_else(|| EngineError::UnknownIndividual(a.clone()))?;
                CNode::Singleton(ind)
            }
            Concept::Not(x) => CNode::Not(self.intern_concept(x)?),
            Concept::Or(x, y) => {
                let x = self.intern_concept(x)?;
                CNode::Or(x, self.intern_concept(y)?)
            }
            Concept::Exists(r, x) => {
                let r = self.intern_role_expr(r)?;
                CNode::Exists(r, self.intern_concept(x)?)
            }
            other => return Err(EngineError::NotCore(other.to_string())),
        };
        Ok(self.intern(node))
    }

    pub fn intern_role_expr(&mut self, r: &Role) -> Result<RoleId, EngineError> {
        let node = match r {
            Role::Atomic(name) => RNode::Atomic(Self::symbol(
                &mut self.role_names,
                &mut self.role_symbols,
                name,
            )),
            Role::Id => RNode::Id,
            Role::Or(x, y) => {
                let x = self.intern_role_expr(x)?;
                RNode::Or(x, self.intern_role_expr(y)?)
            }
            Role::Not(x) => RNode::Not(self.intern_role_expr(x)?),
            Role::Inverse(x) => RNode::Inverse(self.intern_role_expr(x)?),
            other => return Err(EngineError::NotCore(other.to_string())),
        };
        Ok(self.intern_role(node))
    }

    /// Inverse of [`Store::individual_name`].
    pub fn individual_by_name(&self, name: &str) -> Option<Individual> {
        if let Some(i) = self.input_individual(name) {
            return Some(i);
        }
        if name == self.input_names[0] {
            return Some(Individual::ROOT);
        }
        let digits = name.strip_prefix(&self.generated_prefix)?;
        let n: u32 = digits.parse().ok()?;
        (n >= self.input_count() && digits == n.to_string()).then_some(Individual(n))
    }

    /// Id of an already interned core concept; never grows the store.
    pub fn find_concept(&self, c: &Concept) -> Option<ConceptId> {
        let node = match c {
            Concept::Atomic(name) => CNode::Atomic(*self.concept_symbols.get(name)?),
            Concept::Singleton(a) => CNode::Singleton(self.individual_by_name(a)?),
            Concept::Not(x) => CNode::Not(self.find_concept(x)?),
            Concept::Or(x, y) => CNode::Or(self.find_concept(x)?, self.find_concept(y)?),
            Concept::Exists(r, x) => CNode::Exists(self.find_role(r)?, self.find_concept(x)?),
            _ => return None,
        };
        self.lookup(node)
    }

    pub fn find_role(&self, r: &Role) -> Option<RoleId> {
        let node = match r {
            Role::Atomic(name) => RNode::Atomic(*self.role_symbols.get(name)?),
            Role::Id => RNode::Id,
            Role::Or(x, y) => RNode::Or(self.find_role(x)?, self.find_role(y)?),
            Role::Not(x) => RNode::Not(self.find_role(x)?),
            Role::Inverse(x) => RNode::Inverse(self.find_role(x)?),
            _ => return None,
        };
        self.lookup_role(node)
    }

    pub fn to_concept(&self, c: ConceptId) -> Concept {
        match self.node(c) {
            CNode::Atomic(s) => Concept::Atomic(self.concept_name(s).to_string()),
            CNode::Singleton(a) => Concept::Singleton(self.individual_name(a)),
            CNode::Not(x) => Concept::not(self.to_concept(x)),
            CNode::Or(x, y) => Concept::or(self.to_concept(x), self.to_concept(y)),
            CNode::Exists(r, x) => Concept::exists(self.to_role(r), self.to_concept(x)),
        }
    }

    pub fn to_role(&self, r: RoleId) -> Role {
        match self.role(r) {
            RNode::Atomic(s) => Role::Atomic(self.role_name(s).to_string()),
            RNode::Id => Role::Id,
            RNode::Or(x, y) => Role::or(self.to_role(x), self.to_role(y)),
            RNode::Not(x) => Role::not(self.to_role(x)),
            RNode::Inverse(x) => Role::inverse(self.to_role(x)),
        }
    }

    pub fn concept_symbols(&self) -> impl Iterator<Item = &str> {
        self.concept_names.iter().map(String::as_str)
    }

    pub fn role_symbols(&self) -> impl Iterator<Item = &str> {
        self.role_names.iter().map(String::as_str)
    }
}
