//! Tableau calculus for ALBO^id with the unrestricted blocking rule.
//!
//! A [`Branch`] is a set of labelled concepts plus the bookkeeping needed to
//! find rule instances incrementally: every inserted fact queues the
//! instances it takes part in, so scheduling never scans the whole branch.
//! [`Engine::applicable`] does the full scan and serves as a cross-check.

mod rules;
mod store;
mod union_find;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::syntax::{print_concept, Concept};

pub use rules::{Fact, Rule, RuleInstance};
pub use store::{CNode, ConceptId, Individual, RNode, RoleId, Store};
pub use union_find::UnionFind;

use store::Resolve;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("not in core syntax: {0}")]
    NotCore(String),
    #[error("individual `{0}` was not registered with the store")]
    UnknownIndividual(String),
    #[error("no input concept")]
    EmptyInput,
    #[error("rule instance not applicable: {0}")]
    RuleNotApplicable(String),
}

/// When the (ub) rule takes part in the derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Blocking {
    /// (ub) instances are scheduled before everything but closure.
    #[default]
    Eager,
    /// (ub) instances wait below (∃) until the branch has taken this many
    /// steps.
    Delayed(u64),
    /// No (ub) instances at all. Derivations need not terminate.
    Disabled,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EngineConfig {
    pub blocking: Blocking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Root,
    Input,
    Witness {
        parent: Individual,
        concept: ConceptId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    tier: u8,
    newest: u32,
    oldest: u32,
    seq: u64,
    inst: RuleInstance,
}

const TIER_UB: u8 = 1;
const TIER_PLAIN: u8 = 2;
const TIER_BRANCHING: u8 = 3;
const TIER_UB_BLOCKED: u8 = 4;
const TIER_EXISTS: u8 = 5;
const TIER_UB_DELAYED: u8 = 6;

/// One tableau branch. Cloning gives an independent copy.
#[derive(Debug, Clone)]
pub struct Branch {
    positions: HashMap<Fact, u32>,
    order: Vec<Fact>,
    by_label: HashMap<Individual, Vec<ConceptId>>,
    /// `a:∃R.{t}` indexed by `(a, R)`.
    links: HashMap<(Individual, RoleId), Vec<Individual>>,
    /// `a:∃R.{t}` indexed by `(R, t)`.
    links_to: HashMap<(RoleId, Individual), Vec<Individual>>,
    /// `a:¬∃R.C` indexed by `(a, R)`.
    negated: HashMap<(Individual, RoleId), Vec<ConceptId>>,
    /// Facts `a:¬∃¬R.C`.
    windows: Vec<Fact>,
    /// Individuals with `a:{a}`, in insertion order.
    domain: Vec<Individual>,
    /// For each `t`, the `a ≠ t` with `a:{t}`.
    equal_to: HashMap<Individual, Vec<Individual>>,
    first_seen: HashMap<Individual, Fact>,
    origins: Vec<Origin>,
    applied: HashSet<RuleInstance>,
    witness_memo: HashMap<(u32, ConceptId), Individual>,
    equalities: UnionFind,
    clash: Option<(Fact, Fact)>,
    step_count: u64,
    agenda: BinaryHeap<Reverse<Pending>>,
    seq: u64,
    blocking: Blocking,
    node: usize,
}

impl Branch {
    fn empty(store: &Store, blocking: Blocking) -> Branch {
        let mut origins = vec![Origin::Root];
        origins.extend((1..store.input_count()).map(|_| Origin::Input));
        Branch {
            positions: HashMap::new(),
            order: Vec::new(),
            by_label: HashMap::new(),
            links: HashMap::new(),
            links_to: HashMap::new(),
            negated: HashMap::new(),
            windows: Vec::new(),
            domain: Vec::new(),
            equal_to: HashMap::new(),
            first_seen: HashMap::new(),
            origins,
            applied: HashSet::new(),
            witness_memo: HashMap::new(),
            equalities: UnionFind::default(),
            clash: None,
            step_count: 0,
            agenda: BinaryHeap::new(),
            seq: 0,
            blocking,
            node: 0,
        }
    }

    /// Facts in insertion order.
    pub fn facts(&self) -> &[Fact] {
        &self.order
    }

    pub fn contains(&self, f: Fact) -> bool {
        self.positions.contains_key(&f)
    }

    pub fn position(&self, f: Fact) -> Option<u32> {
        self.positions.get(&f).copied()
    }

    pub fn concepts_of(&self, a: Individual) -> &[ConceptId] {
        self.by_label.get(&a).map_or(&[], Vec::as_slice)
    }

    pub fn is_closed(&self) -> bool {
        self.clash.is_some()
    }

    /// The complementary pair `a:C`, `a:¬C` that closed the branch.
    pub fn clash(&self) -> Option<(Fact, Fact)> {
        self.clash
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Number of individual indices allocated so far.
    pub fn individual_count(&self) -> u32 {
        self.origins.len() as u32
    }

    pub fn origin(&self, a: Individual) -> Option<Origin> {
        self.origins.get(a.index()).copied()
    }

    /// Individuals that occur in some fact, in index order.
    pub fn individuals(&self) -> Vec<Individual> {
        let mut v: Vec<Individual> = self.first_seen.keys().copied().collect();
        v.sort();
        v
    }

    /// Individuals `a` with `a:{a}` in the branch.
    pub fn domain(&self) -> &[Individual] {
        &self.domain
    }

    /// Condition (c1): some `a':{a}` with `a' < a` is in the branch.
    pub fn is_blocked(&self, a: Individual) -> bool {
        self.equal_to
            .get(&a)
            .is_some_and(|v| v.iter().any(|&x| x < a))
    }

    /// Least individual known equal to `a`.
    pub fn representative(&self, a: Individual) -> Individual {
        Individual(self.equalities.find(a.0))
    }

    pub fn was_applied(&self, inst: &RuleInstance) -> bool {
        self.applied.contains(inst)
    }

    pub fn applied_count(&self) -> usize {
        self.applied.len()
    }

    pub fn witness(&self, a: Individual, existential: ConceptId) -> Option<Individual> {
        self.witness_memo
            .get(&(self.equalities.find(a.0), existential))
            .copied()
    }

    /// Identifier used by trace consumers; assigned by the search driver.
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn set_node(&mut self, node: usize) {
        self.node = node;
    }

    pub fn pending_len(&self) -> usize {
        self.agenda.len()
    }

    fn tier(&self, inst: &RuleInstance) -> u8 {
        match inst.rule {
            Rule::UB => {
                if let Blocking::Delayed(n) = self.blocking {
                    if self.step_count < n {
                        return TIER_UB_DELAYED;
                    }
                }
                let second = inst.second.expect("binary");
                if self.is_blocked(inst.first.label) || self.is_blocked(second.label) {
                    TIER_UB_BLOCKED
                } else {
                    TIER_UB
                }
            }
            Rule::Or | Rule::ExistsOr | Rule::NotExistsNot => TIER_BRANCHING,
            Rule::Exists => TIER_EXISTS,
            _ => TIER_PLAIN,
        }
    }

    fn queue(&mut self, inst: RuleInstance) {
        let p = self.positions[&inst.first];
        let q = inst.second.map_or(p, |s| self.positions[&s]);
        let tier = self.tier(&inst);
        self.queue_with(inst, tier, p.max(q), p.min(q));
    }

    fn queue_with(&mut self, inst: RuleInstance, tier: u8, newest: u32, oldest: u32) {
        self.seq += 1;
        self.agenda.push(Reverse(Pending {
            tier,
            newest,
            oldest,
            seq: self.seq,
            inst,
        }));
    }

    fn singleton_fact(&self, store: &Store, a: Individual, t: Individual) -> Option<Fact> {
        store
            .lookup(CNode::Singleton(t))
            .map(|c| Fact::new(a, c))
            .filter(|f| self.contains(*f))
    }

    fn link_fact(&self, store: &Store, a: Individual, r: RoleId, t: Individual) -> Fact {
        let s = store.lookup(CNode::Singleton(t)).expect("indexed link");
        let c = store.lookup(CNode::Exists(r, s)).expect("indexed link");
        Fact::new(a, c)
    }

    fn union(&mut self, a: Individual, b: Individual) {
        if let Some((keep, drop)) = self.equalities.union(a.0, b.0) {
            let moved: Vec<(u32, ConceptId)> = self
                .witness_memo
                .keys()
                .filter(|(r, _)| *r == drop)
                .copied()
                .collect();
            for key in moved {
                let w = self.witness_memo.remove(&key).expect("present");
                self.witness_memo.entry((keep, key.1)).or_insert(w);
            }
        }
    }

    /// Adds `f` and queues every instance it takes part in.
    fn insert(&mut self, store: &Store, f: Fact) {
        if self.positions.contains_key(&f) || self.clash.is_some() {
            return;
        }
        self.positions.insert(f, self.order.len() as u32);
        self.order.push(f);
        let a = f.label;
        let c = f.concept;

        if let CNode::Not(x) = store.node(c) {
            if self.contains(Fact::new(a, x)) {
                self.clash = Some((Fact::new(a, x), f));
            }
        }
        if let Some(n) = store.lookup(CNode::Not(c)) {
            if self.contains(Fact::new(a, n)) {
                self.clash = Some((f, Fact::new(a, n)));
            }
        }
        if self.clash.is_some() {
            return;
        }

        for &i in std::iter::once(&a).chain(store.individuals_in(c)) {
            if let std::collections::hash_map::Entry::Vacant(slot) = self.first_seen.entry(i) {
                slot.insert(f);
                self.queue(RuleInstance::refl(f, i));
            }
        }

        match store.node(c) {
            CNode::Not(x) => match store.node(x) {
                CNode::Not(_) => self.queue(RuleInstance::unary(Rule::NotNot, f)),
                CNode::Or(..) => self.queue(RuleInstance::unary(Rule::NotOr, f)),
                CNode::Singleton(_) => self.queue(RuleInstance::unary(Rule::NotSym, f)),
                CNode::Atomic(_) => {}
                CNode::Exists(r, d) => {
                    self.negated.entry((a, r)).or_default().push(d);
                    let targets = self.links.get(&(a, r)).cloned().unwrap_or_default();
                    for t in targets {
                        let g = self.link_fact(store, a, r, t);
                        self.queue(RuleInstance::binary(Rule::NotExists, f, g));
                    }
                    match store.role(r) {
                        RNode::Or(..) => self.queue(RuleInstance::unary(Rule::NotExistsOr, f)),
                        RNode::Id => self.queue(RuleInstance::unary(Rule::NotExistsId, f)),
                        RNode::Not(_) => {
                            self.windows.push(f);
                            for t in self.domain.clone() {
                                let g = self.singleton_fact(store, t, t).expect("domain fact");
                                self.queue(RuleInstance::binary(Rule::NotExistsNot, f, g));
                            }
                        }
                        RNode::Inverse(s) => {
                            let sources = self.links_to.get(&(s, a)).cloned().unwrap_or_default();
                            for src in sources {
                                let g = self.link_fact(store, src, s, a);
                                self.queue(RuleInstance::binary(Rule::NotExistsInv, f, g));
                            }
                        }
                        RNode::Atomic(_) => {}
                    }
                }
            },
            CNode::Or(..) => self.queue(RuleInstance::unary(Rule::Or, f)),
            CNode::Exists(r, d) => match store.node(d) {
                CNode::Singleton(t) => {
                    self.links.entry((a, r)).or_default().push(t);
                    self.links_to.entry((r, t)).or_default().push(a);
                    for d2 in self.negated.get(&(a, r)).cloned().unwrap_or_default() {
                        let neg = Self::negated_exists(store, r, d2);
                        self.queue(RuleInstance::binary(Rule::NotExists, Fact::new(a, neg), f));
                    }
                    if let Some(rinv) = store.lookup_role(RNode::Inverse(r)) {
                        for d2 in self.negated.get(&(t, rinv)).cloned().unwrap_or_default() {
                            let neg = Self::negated_exists(store, rinv, d2);
                            self.queue(RuleInstance::binary(
                                Rule::NotExistsInv,
                                Fact::new(t, neg),
                                f,
                            ));
                        }
                    }
                    let rule = match store.role(r) {
                        RNode::Or(..) => Some(Rule::ExistsOr),
                        RNode::Inverse(_) => Some(Rule::ExistsInv),
                        RNode::Not(_) => Some(Rule::ExistsNot),
                        RNode::Id => Some(Rule::ExistsId),
                        RNode::Atomic(_) => None,
                    };
                    if let Some(rule) = rule {
                        self.queue(RuleInstance::unary(rule, f));
                    }
                }
                _ => self.queue(RuleInstance::unary(Rule::Exists, f)),
            },
            CNode::Singleton(t) if t == a => {
                for w in self.windows.clone() {
                    self.queue(RuleInstance::binary(Rule::NotExistsNot, w, f));
                }
                if self.blocking != Blocking::Disabled {
                    for o in self.domain.clone() {
                        let fo = self.singleton_fact(store, o, o).expect("domain fact");
                        let inst = if o < a {
                            RuleInstance::binary(Rule::UB, fo, f)
                        } else {
                            RuleInstance::binary(Rule::UB, f, fo)
                        };
                        self.queue(inst);
                    }
                }
                self.domain.push(a);
            }
            CNode::Singleton(t) => {
                self.equal_to.entry(t).or_default().push(a);
                self.queue(RuleInstance::unary(Rule::Sym, f));
                for cc in self.concepts_of(t).to_vec() {
                    self.queue(RuleInstance::binary(Rule::Mon, f, Fact::new(t, cc)));
                }
                self.union(a, t);
            }
            CNode::Atomic(_) => {}
        }

        for x in self.equal_to.get(&a).cloned().unwrap_or_default() {
            if let Some(g) = self.singleton_fact(store, x, a) {
                self.queue(RuleInstance::binary(Rule::Mon, g, f));
            }
        }
        self.by_label.entry(a).or_default().push(c);
    }

    fn negated_exists(store: &Store, r: RoleId, d: ConceptId) -> ConceptId {
        let e = store.lookup(CNode::Exists(r, d)).expect("indexed");
        store.lookup(CNode::Not(e)).expect("indexed")
    }
}

/// Conclusions of one child of a rule application, or `None` when some
/// concept in it has never been interned (so it cannot be in any branch).
type ChildSet = Option<Vec<Fact>>;

struct Conclude<R> {
    r: R,
}

impl<R: Resolve> Conclude<R> {
    fn not(&mut self, c: ConceptId) -> Option<ConceptId> {
        self.r.concept(CNode::Not(c))
    }

    fn single(&mut self, a: Individual) -> Option<ConceptId> {
        self.r.concept(CNode::Singleton(a))
    }

    fn link(&mut self, r: RoleId, t: Individual) -> Option<ConceptId> {
        let s = self.single(t)?;
        self.r.concept(CNode::Exists(r, s))
    }

    fn not_exists(&mut self, r: RoleId, c: ConceptId) -> Option<ConceptId> {
        let e = self.r.concept(CNode::Exists(r, c))?;
        self.not(e)
    }
}

fn facts(items: &[(Individual, Option<ConceptId>)]) -> ChildSet {
    items
        .iter()
        .map(|&(a, c)| c.map(|c| Fact::new(a, c)))
        .collect()
}

fn singleton_of(store: &Store, c: ConceptId) -> Option<Individual> {
    match store.node(c) {
        CNode::Singleton(t) => Some(t),
        _ => None,
    }
}

/// `∃R.{t}` as `(R, t)`.
fn link_of(store: &Store, c: ConceptId) -> Option<(RoleId, Individual)> {
    match store.node(c) {
        CNode::Exists(r, d) => singleton_of(store, d).map(|t| (r, t)),
        _ => None,
    }
}

/// `¬∃R.C` as `(R, C)`.
fn not_exists_of(store: &Store, c: ConceptId) -> Option<(RoleId, ConceptId)> {
    match store.node(c) {
        CNode::Not(x) => match store.node(x) {
            CNode::Exists(r, d) => Some((r, d)),
            _ => None,
        },
        _ => None,
    }
}

/// Child conclusion sets of every rule but (∃) and closure. `Err` when the
/// premises do not have the shape the rule requires.
fn child_sets<R: Resolve>(res: R, inst: &RuleInstance) -> Result<Vec<ChildSet>, ()> {
    let mut k = Conclude { r: res };
    let f = inst.first;
    let a = f.label;
    let node = k.r.store().node(f.concept);
    let inner = |k: &Conclude<R>, c: ConceptId| k.r.store().node(c);
    let singleton_of = |k: &Conclude<R>, c: ConceptId| singleton_of(k.r.store(), c);
    let exists_link = |k: &Conclude<R>, c: ConceptId| link_of(k.r.store(), c);
    let not_exists = |k: &Conclude<R>, c: ConceptId| not_exists_of(k.r.store(), c);
    let role = |k: &Conclude<R>, r: RoleId| k.r.store().role(r);
    let second = || inst.second.ok_or(());
    let sets = match inst.rule {
        Rule::NotNot => match node {
            CNode::Not(x) => match inner(&k, x) {
                CNode::Not(y) => vec![facts(&[(a, Some(y))])],
                _ => return Err(()),
            },
            _ => return Err(()),
        },
        Rule::NotOr => match node {
            CNode::Not(x) => match inner(&k, x) {
                CNode::Or(c, d) => vec![facts(&[(a, k.not(c)), (a, k.not(d))])],
                _ => return Err(()),
            },
            _ => return Err(()),
        },
        Rule::Or => match node {
            CNode::Or(c, d) => vec![facts(&[(a, Some(c))]), facts(&[(a, Some(d))])],
            _ => return Err(()),
        },
        Rule::NotExists => {
            let (r, d) = not_exists(&k, f.concept).ok_or(())?;
            let g = second()?;
            let (r2, t) = exists_link(&k, g.concept).ok_or(())?;
            if g.label != a || r2 != r {
                return Err(());
            }
            vec![facts(&[(t, k.not(d))])]
        }
        Rule::Sym => {
            let t = singleton_of(&k, f.concept).ok_or(())?;
            vec![facts(&[(t, k.single(a))])]
        }
        Rule::NotSym => match node {
            CNode::Not(x) => {
                let t = singleton_of(&k, x).ok_or(())?;
                let s = k.single(a);
                vec![facts(&[(t, s.and_then(|s| k.not(s)))])]
            }
            _ => return Err(()),
        },
        Rule::Mon => {
            let t = singleton_of(&k, f.concept).ok_or(())?;
            let g = second()?;
            if g.label != t {
                return Err(());
            }
            vec![facts(&[(a, Some(g.concept))])]
        }
        Rule::Refl => {
            let i = inst.subject.ok_or(())?;
            if i != a && !k.r.store().individuals_in(f.concept).contains(&i) {
                return Err(());
            }
            vec![facts(&[(i, k.single(i))])]
        }
        Rule::ExistsOr => {
            let (r, t) = exists_link(&k, f.concept).ok_or(())?;
            match role(&k, r) {
                RNode::Or(r1, r2) => {
                    vec![facts(&[(a, k.link(r1, t))]), facts(&[(a, k.link(r2, t))])]
                }
                _ => return Err(()),
            }
        }
        Rule::NotExistsOr => {
            let (r, d) = not_exists(&k, f.concept).ok_or(())?;
            match role(&k, r) {
                RNode::Or(r1, r2) => {
                    vec![facts(&[(a, k.not_exists(r1, d)), (a, k.not_exists(r2, d))])]
                }
                _ => return Err(()),
            }
        }
        Rule::ExistsInv => {
            let (r, t) = exists_link(&k, f.concept).ok_or(())?;
            match role(&k, r) {
                RNode::Inverse(s) => vec![facts(&[(t, k.link(s, a))])],
                _ => return Err(()),
            }
        }
        Rule::NotExistsInv => {
            let (r, d) = not_exists(&k, f.concept).ok_or(())?;
            let s = match role(&k, r) {
                RNode::Inverse(s) => s,
                _ => return Err(()),
            };
            let g = second()?;
            let (r2, t) = exists_link(&k, g.concept).ok_or(())?;
            if r2 != s || t != a {
                return Err(());
            }
            vec![facts(&[(g.label, k.not(d))])]
        }
        Rule::ExistsNot => {
            let (r, t) = exists_link(&k, f.concept).ok_or(())?;
            match role(&k, r) {
                RNode::Not(s) => {
                    let one = k.link(s, t);
                    vec![facts(&[(a, one.and_then(|e| k.not(e)))])]
                }
                _ => return Err(()),
            }
        }
        Rule::NotExistsNot => {
            let (r, d) = not_exists(&k, f.concept).ok_or(())?;
            let s = match role(&k, r) {
                RNode::Not(s) => s,
                _ => return Err(()),
            };
            let g = second()?;
            if singleton_of(&k, g.concept) != Some(g.label) {
                return Err(());
            }
            let t = g.label;
            vec![facts(&[(a, k.link(s, t))]), facts(&[(t, k.not(d))])]
        }
        Rule::ExistsId => {
            let (r, t) = exists_link(&k, f.concept).ok_or(())?;
            if role(&k, r) != RNode::Id {
                return Err(());
            }
            vec![facts(&[(a, k.single(t))])]
        }
        Rule::NotExistsId => {
            let (r, d) = not_exists(&k, f.concept).ok_or(())?;
            if role(&k, r) != RNode::Id {
                return Err(());
            }
            vec![facts(&[(a, k.not(d))])]
        }
        Rule::UB => {
            let g = second()?;
            let t = g.label;
            if singleton_of(&k, f.concept) != Some(a)
                || singleton_of(&k, g.concept) != Some(t)
                || a >= t
            {
                return Err(());
            }
            let s = k.single(t);
            vec![facts(&[(a, s)]), facts(&[(a, s.and_then(|s| k.not(s)))])]
        }
        Rule::Exists | Rule::Clash => return Err(()),
    };
    Ok(sets)
}

/// Outcome of applying one rule instance in place.
#[derive(Debug)]
pub struct Expansion {
    /// One conclusion set per child, left child first.
    pub conclusions: Vec<Vec<Fact>>,
    /// The right child of a branching rule; the left child is the branch
    /// that was passed in.
    pub right: Option<Branch>,
}

/// Owns the concept store and applies rules to branches.
#[derive(Debug, Clone)]
pub struct Engine {
    store: Store,
    config: EngineConfig,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Engine {
        Engine {
            store: Store::new(&[]),
            config,
        }
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Root branch `{a0:c}`.
    pub fn init(&mut self, c: &Concept) -> Result<Branch, EngineError> {
        self.init_set(std::slice::from_ref(c))
    }

    /// Root branch `{a0:C | C in cs}`. Resets the store.
    pub fn init_set(&mut self, cs: &[Concept]) -> Result<Branch, EngineError> {
        if cs.is_empty() {
            return Err(EngineError::EmptyInput);
        }
        let mut names: Vec<String> = Vec::new();
        for c in cs {
            for a in c.individuals() {
                if !names.contains(&a) {
                    names.push(a);
                }
            }
        }
        self.store = Store::new(&names);
        let ids = cs
            .iter()
            .map(|c| self.store.intern_concept(c))
            .collect::<Result<Vec<_>, _>>()?;
        let mut b = Branch::empty(&self.store, self.config.blocking);
        for id in ids {
            b.insert(&self.store, Fact::new(Individual::ROOT, id));
        }
        Ok(b)
    }

    pub fn is_blocked(&self, b: &Branch, a: Individual) -> bool {
        b.is_blocked(a)
    }

    fn exists_parts(&self, f: Fact) -> Option<(RoleId, ConceptId)> {
        match self.store.node(f.concept) {
            CNode::Exists(r, d) if !matches!(self.store.node(d), CNode::Singleton(_)) => {
                Some((r, d))
            }
            _ => None,
        }
    }

    /// True if some child's conclusions are already in the branch, so the
    /// instance would add nothing.
    fn is_redundant(&self, b: &Branch, inst: &RuleInstance) -> bool {
        if inst.rule == Rule::Exists {
            let Some((r, d)) = self.exists_parts(inst.first) else {
                return false;
            };
            let Some(w) = b.witness(inst.first.label, inst.first.concept) else {
                return false;
            };
            let mut k = Conclude { r: &self.store };
            return match k.link(r, w) {
                Some(l) => {
                    b.contains(Fact::new(inst.first.label, l)) && b.contains(Fact::new(w, d))
                }
                None => false,
            };
        }
        match child_sets(&self.store, inst) {
            Ok(sets) => sets
                .iter()
                .any(|s| s.as_ref().is_some_and(|s| s.iter().all(|f| b.contains(*f)))),
            Err(()) => false,
        }
    }

    fn check(&self, b: &Branch, inst: &RuleInstance) -> Result<(), EngineError> {
        let fail = |why: &str| {
            Err(EngineError::RuleNotApplicable(format!(
                "{} on {}: {why}",
                inst.rule,
                self.instance_premises_text(inst)
            )))
        };
        if b.is_closed() {
            return fail("branch is closed");
        }
        if !inst.premises().all(|p| b.contains(p)) {
            return fail("premise not in branch");
        }
        if b.applied.contains(inst) {
            return fail("already applied");
        }
        match inst.rule {
            Rule::Clash => return fail("closure is detected on insertion"),
            Rule::Exists => {
                if self.exists_parts(inst.first).is_none() || inst.second.is_some() {
                    return fail("premise must be an existential with a non-singleton filler");
                }
                if b.is_blocked(inst.first.label) {
                    return fail("label is blocked");
                }
            }
            Rule::UB if self.config.blocking == Blocking::Disabled => {
                return fail("blocking is disabled")
            }
            _ => {
                if child_sets(&self.store, inst).is_err() {
                    return fail("premises do not match the rule");
                }
            }
        }
        if self.is_redundant(b, inst) {
            return fail("conclusions already present");
        }
        Ok(())
    }

    /// Applies `inst` to `b` in place. For branching rules `b` becomes the
    /// left child and the right child is returned.
    pub fn apply_in_place(
        &mut self,
        b: &mut Branch,
        inst: &RuleInstance,
    ) -> Result<Expansion, EngineError> {
        self.check(b, inst)?;
        b.applied.insert(inst.clone());
        b.step_count += 1;
        let sets: Vec<Vec<Fact>> = if inst.rule == Rule::Exists {
            let f = inst.first;
            let (r, d) = self.exists_parts(f).expect("checked");
            let w = match b.witness(f.label, f.concept) {
                Some(w) => w,
                None => {
                    let w = Individual(b.origins.len() as u32);
                    b.origins.push(Origin::Witness {
                        parent: f.label,
                        concept: f.concept,
                    });
                    let rep = b.equalities.find(f.label.0);
                    b.witness_memo.insert((rep, f.concept), w);
                    w
                }
            };
            let mut k = Conclude { r: &mut self.store };
            let l = k.link(r, w).expect("interned");
            vec![vec![Fact::new(f.label, l), Fact::new(w, d)]]
        } else {
            child_sets(&mut self.store, inst)
                .expect("checked")
                .into_iter()
                .map(|s| s.expect("interned"))
                .collect()
        };
        let right = if sets.len() == 2 {
            let mut right = b.clone();
            Self::add_all(&self.store, &mut right, &sets[1]);
            Some(right)
        } else {
            None
        };
        Self::add_all(&self.store, b, &sets[0]);
        Ok(Expansion {
            conclusions: sets,
            right,
        })
    }

    fn add_all(store: &Store, b: &mut Branch, facts: &[Fact]) {
        let was_open = !b.is_closed();
        for &f in facts {
            b.insert(store, f);
        }
        if was_open && b.is_closed() {
            // closure counts as a derivation step of its own
            b.step_count += 1;
        }
    }

    /// Applies `inst`, returning one or two children.
    pub fn apply(&mut self, b: &Branch, inst: &RuleInstance) -> Result<Vec<Branch>, EngineError> {
        let mut left = b.clone();
        let exp = self.apply_in_place(&mut left, inst)?;
        let mut out = vec![left];
        out.extend(exp.right);
        Ok(out)
    }

    /// Every instance that could be applied now, found by scanning the
    /// whole branch. Independent of the incremental agenda.
    pub fn applicable(&self, b: &Branch) -> Vec<RuleInstance> {
        if b.is_closed() {
            return Vec::new();
        }
        let store = &self.store;
        let mut found: Vec<RuleInstance> = Vec::new();
        let mut push = |inst: RuleInstance| found.push(inst);
        let link_of = |c: ConceptId| match store.node(c) {
            CNode::Exists(r, d) => match store.node(d) {
                CNode::Singleton(t) => Some((r, t)),
                _ => None,
            },
            _ => None,
        };
        for &f in &b.order {
            let a = f.label;
            match store.node(f.concept) {
                CNode::Not(x) => match store.node(x) {
                    CNode::Not(_) => push(RuleInstance::unary(Rule::NotNot, f)),
                    CNode::Or(..) => push(RuleInstance::unary(Rule::NotOr, f)),
                    CNode::Singleton(_) => push(RuleInstance::unary(Rule::NotSym, f)),
                    CNode::Atomic(_) => {}
                    CNode::Exists(r, _) => {
                        for &c in b.concepts_of(a) {
                            if link_of(c).is_some_and(|(r2, _)| r2 == r) {
                                push(RuleInstance::binary(Rule::NotExists, f, Fact::new(a, c)));
                            }
                        }
                        match store.role(r) {
                            RNode::Or(..) => push(RuleInstance::unary(Rule::NotExistsOr, f)),
                            RNode::Id => push(RuleInstance::unary(Rule::NotExistsId, f)),
                            RNode::Not(_) => {
                                for &g in &b.order {
                                    if matches!(store.node(g.concept), CNode::Singleton(t) if t == g.label)
                                    {
                                        push(RuleInstance::binary(Rule::NotExistsNot, f, g));
                                    }
                                }
                            }
                            RNode::Inverse(s) => {
                                for &g in &b.order {
                                    if link_of(g.concept) == Some((s, a)) {
                                        push(RuleInstance::binary(Rule::NotExistsInv, f, g));
                                    }
                                }
                            }
                            RNode::Atomic(_) => {}
                        }
                    }
                },
                CNode::Or(..) => push(RuleInstance::unary(Rule::Or, f)),
                CNode::Exists(r, _) => match link_of(f.concept) {
                    Some(_) => match store.role(r) {
                        RNode::Or(..) => push(RuleInstance::unary(Rule::ExistsOr, f)),
                        RNode::Inverse(_) => push(RuleInstance::unary(Rule::ExistsInv, f)),
                        RNode::Not(_) => push(RuleInstance::unary(Rule::ExistsNot, f)),
                        RNode::Id => push(RuleInstance::unary(Rule::ExistsId, f)),
                        RNode::Atomic(_) => {}
                    },
                    None => {
                        if !b.is_blocked(a) {
                            push(RuleInstance::unary(Rule::Exists, f));
                        }
                    }
                },
                CNode::Singleton(t) if t != a => {
                    push(RuleInstance::unary(Rule::Sym, f));
                    for &c in b.concepts_of(t) {
                        push(RuleInstance::binary(Rule::Mon, f, Fact::new(t, c)));
                    }
                }
                CNode::Singleton(_) | CNode::Atomic(_) => {}
            }
        }
        if self.config.blocking != Blocking::Disabled {
            let mut dom: Vec<Fact> = b
                .order
                .iter()
                .copied()
                .filter(|g| matches!(store.node(g.concept), CNode::Singleton(t) if t == g.label))
                .collect();
            dom.sort();
            for (i, &x) in dom.iter().enumerate() {
                for &y in &dom[i + 1..] {
                    push(RuleInstance::binary(Rule::UB, x, y));
                }
            }
        }
        for (&i, &f) in &b.first_seen {
            push(RuleInstance::refl(f, i));
        }
        let mut seen = HashSet::new();
        found.retain(|inst| {
            seen.insert(inst.clone()) && !b.applied.contains(inst) && !self.is_redundant(b, inst)
        });
        found.sort();
        found
    }

    /// Pops the next instance from the branch agenda: closure first, then
    /// (ub) between unblocked individuals, other non-branching rules,
    /// branching rules, remaining (ub), and (∃) last; oldest premises first
    /// within a tier.
    pub fn schedule(&self, b: &mut Branch) -> Option<RuleInstance> {
        if b.is_closed() {
            return None;
        }
        while let Some(Reverse(p)) = b.agenda.pop() {
            let inst = p.inst;
            if b.applied.contains(&inst) {
                continue;
            }
            if inst.rule == Rule::Exists && b.is_blocked(inst.first.label) {
                continue;
            }
            let tier = b.tier(&inst);
            if tier != p.tier {
                b.queue_with(inst, tier, p.newest, p.oldest);
                continue;
            }
            if self.is_redundant(b, &inst) {
                continue;
            }
            return Some(inst);
        }
        None
    }

    pub fn is_fully_expanded(&self, b: &Branch) -> bool {
        !b.is_closed() && self.applicable(b).is_empty()
    }

    pub fn concept_text(&self, c: ConceptId) -> String {
        print_concept(&self.store.to_concept(c))
    }

    pub fn fact_text(&self, f: Fact) -> String {
        format!(
            "{}:{}",
            self.store.individual_name(f.label),
            self.concept_text(f.concept)
        )
    }

    fn instance_premises_text(&self, inst: &RuleInstance) -> String {
        inst.premises()
            .map(|f| self.fact_text(f))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Interned id of a core concept, if it was ever built.
    pub fn find_concept(&self, c: &Concept) -> Option<ConceptId> {
        self.store.find_concept(c)
    }
}
