//! Reading a model off a fully expanded open branch.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{eval_concept, Model, SemanticsError};
use crate::engine::{Branch, CNode, Engine, Fact, Individual, RNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("branch is closed")]
    Closed,
    #[error("branch still has {0} applicable rule instances")]
    NotExpanded(usize),
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub model: Model,
    /// Domain element of each individual index that has one.
    pub class_of: BTreeMap<Individual, usize>,
    /// Least individual of each class, indexed by element.
    pub representatives: Vec<Individual>,
}

impl Extraction {
    /// Element denoting `a`; individuals outside the domain map to 0.
    pub fn element(&self, a: Individual) -> usize {
        self.class_of.get(&a).copied().unwrap_or(0)
    }
}

/// Builds the model whose elements are the classes of individuals `a`
/// with `a:{a}`, where `a` and `b` share a class when `a:{b}` holds.
pub fn extract_model(engine: &Engine, b: &Branch) -> Result<Extraction, ExtractError> {
    if b.is_closed() {
        return Err(ExtractError::Closed);
    }
    let pending = engine.applicable(b).len();
    if pending > 0 {
        return Err(ExtractError::NotExpanded(pending));
    }
    let store = engine.store();

    let mut domain: Vec<Individual> = b.domain().to_vec();
    domain.sort();
    let in_domain: BTreeSet<Individual> = domain.iter().copied().collect();
    let mut class_of = BTreeMap::new();
    let mut representatives = Vec::new();
    for &a in &domain {
        if class_of.contains_key(&a) {
            continue;
        }
        let class = representatives.len();
        representatives.push(a);
        class_of.insert(a, class);
        for &c in b.concepts_of(a) {
            if let CNode::Singleton(other) = store.node(c) {
                if in_domain.contains(&other) {
                    class_of.entry(other).or_insert(class);
                }
            }
        }
    }

    let mut model = Model::new(representatives.len().max(1));
    let element = |a: Individual| class_of.get(&a).copied().unwrap_or(0);
    for name in store.concept_symbols() {
        model.concepts.insert(name.to_string(), Default::default());
    }
    for name in store.role_symbols() {
        model.roles.insert(name.to_string(), Default::default());
    }
    for f in b.facts() {
        match store.node(f.concept) {
            CNode::Atomic(sym) => {
                model
                    .concepts
                    .get_mut(store.concept_name(sym))
                    .expect("symbol registered")
                    .insert(element(f.label));
            }
            CNode::Exists(r, filler) => {
                if let (RNode::Atomic(sym), CNode::Singleton(t)) =
                    (store.role(r), store.node(filler))
                {
                    model
                        .roles
                        .get_mut(store.role_name(sym))
                        .expect("symbol registered")
                        .insert((element(f.label), element(t)));
                }
            }
            _ => {}
        }
    }
    for i in 0..b.individual_count() {
        let a = Individual(i);
        model
            .individuals
            .insert(store.individual_name(a), element(a));
    }
    Ok(Extraction {
        model,
        class_of,
        representatives,
    })
}

/// Facts `a:D` of `b` whose element is not in the extension of `D`.
pub fn check_reflection(
    engine: &Engine,
    b: &Branch,
    x: &Extraction,
) -> Result<Vec<Fact>, SemanticsError> {
    let store = engine.store();
    let mut ext_cache = BTreeMap::new();
    let mut bad = Vec::new();
    for &f in b.facts() {
        let ext = match ext_cache.entry(f.concept) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(eval_concept(&x.model, &store.to_concept(f.concept))?),
        };
        if !ext.contains(&x.element(f.label)) {
            bad.push(f);
        }
    }
    Ok(bad)
}
