//! Finite model finder: grounds `∃x.ST_x(c)` over a fixed domain, hands the
//! propositional encoding to a SAT solver, then walks the variables in
//! canonical order to pick the first model.

use std::collections::{BTreeMap, HashMap};

use varisat::{ExtendFormula, Lit, Solver};

use super::fo::{sentence, Formula, Term, Var};
use super::Model;
use crate::syntax::{Concept, SymbolKind};

/// First model of `c` in canonical order with at most `max_domain`
/// elements: smaller domains first, then individuals placed on the least
/// possible element, then unary and binary extensions read as one binary
/// counter (symbols sorted, elements ascending, pairs lexicographic).
pub fn enumerate_model(c: &Concept, max_domain: usize) -> Option<Model> {
    (1..=max_domain).find_map(|d| model_of_size(c, d))
}

/// First model of `c` with exactly `d` elements, in the same order as
/// [`enumerate_model`].
pub fn model_of_size(c: &Concept, d: usize) -> Option<Model> {
    if d == 0 {
        return None;
    }
    let mut g = Grounder::new(c, d);
    let root = sentence(c);
    match g.ground(&root, [None, None]) {
        G::False => return None,
        G::True => {}
        G::Lit(l) => g.solver.add_clause(&[l]),
    }
    if !g.solve(&[]) {
        return None;
    }

    let mut fixed = Vec::new();
    let individual_lits: Vec<Vec<Lit>> = g.individuals.values().cloned().collect();
    for lits in individual_lits {
        let chosen = (0..d - 1)
            .find(|&e| {
                let mut trial = fixed.clone();
                trial.push(lits[e]);
                g.solve(&trial)
            })
            .unwrap_or(d - 1);
        fixed.push(lits[chosen]);
    }
    let order: Vec<Lit> = g
        .concepts
        .values()
        .chain(g.roles.values())
        .flatten()
        .copied()
        .collect();
    for l in order {
        let mut trial = fixed.clone();
        trial.push(!l);
        if g.solve(&trial) {
            fixed.push(!l);
        } else {
            fixed.push(l);
        }
    }
    assert!(g.solve(&fixed), "canonical assignment is satisfiable");
    let model = g.solver.model().expect("last solve succeeded");
    let positive: std::collections::HashSet<Lit> = model.into_iter().collect();
    let holds = |l: &Lit| positive.contains(l);

    let mut m = Model::new(d);
    for (name, lits) in &g.individuals {
        let e = lits.iter().position(holds).expect("exactly one element");
        m.individuals.insert(name.clone(), e);
    }
    for (name, lits) in &g.concepts {
        let ext = (0..d).filter(|&e| holds(&lits[e])).collect();
        m.concepts.insert(name.clone(), ext);
    }
    for (name, lits) in &g.roles {
        let ext = (0..d * d)
            .filter(|&i| holds(&lits[i]))
            .map(|i| (i / d, i % d))
            .collect();
        m.roles.insert(name.clone(), ext);
    }
    Some(m)
}

#[derive(Clone, Copy)]
enum G {
    True,
    False,
    Lit(Lit),
}

impl std::ops::Not for G {
    type Output = G;

    fn not(self) -> G {
        match self {
            G::True => G::False,
            G::False => G::True,
            G::Lit(l) => G::Lit(!l),
        }
    }
}

struct Grounder<'s> {
    solver: Solver<'s>,
    d: usize,
    individuals: BTreeMap<String, Vec<Lit>>,
    concepts: BTreeMap<String, Vec<Lit>>,
    roles: BTreeMap<String, Vec<Lit>>,
    memo: HashMap<(*const Formula, [Option<usize>; 2]), G>,
}

impl<'s> Grounder<'s> {
    fn new(c: &Concept, d: usize) -> Grounder<'s> {
        let mut solver = Solver::new();
        let fresh = |count: usize, solver: &mut Solver| -> Vec<Lit> {
            (0..count).map(|_| solver.new_lit()).collect()
        };
        let mut individuals = BTreeMap::new();
        let mut concepts = BTreeMap::new();
        let mut roles = BTreeMap::new();
        let mut names = Vec::new();
        c.visit_symbols(&mut |name, kind| names.push((name.to_string(), kind)));
        for (name, kind) in names {
            match kind {
                SymbolKind::Individual => {
                    individuals
                        .entry(name)
                        .or_insert_with(|| fresh(d, &mut solver));
                }
                SymbolKind::Concept => {
                    concepts
                        .entry(name)
                        .or_insert_with(|| fresh(d, &mut solver));
                }
                SymbolKind::Role => {
                    roles
                        .entry(name)
                        .or_insert_with(|| fresh(d * d, &mut solver));
                }
            }
        }
        for lits in individuals.values() {
            solver.add_clause(lits);
            for i in 0..d {
                for j in i + 1..d {
                    solver.add_clause(&[!lits[i], !lits[j]]);
                }
            }
        }
        Grounder {
            solver,
            d,
            individuals,
            concepts,
            roles,
            memo: HashMap::new(),
        }
    }

    fn solve(&mut self, assumptions: &[Lit]) -> bool {
        self.solver.assume(assumptions);
        self.solver.solve().expect("solver without proof output")
    }

    fn ground(&mut self, f: &Formula, env: [Option<usize>; 2]) -> G {
        let key = (f as *const Formula, env);
        if let Some(&g) = self.memo.get(&key) {
            return g;
        }
        let at = |v: &Var| env[*v as usize].expect("closed formula");
        let g = match f {
            Formula::True => G::True,
            Formula::False => G::False,
            Formula::Unary(a, v) => G::Lit(self.concepts[a][at(v)]),
            Formula::Binary(q, v, w) => G::Lit(self.roles[q][at(v) * self.d + at(w)]),
            Formula::Eq(s, t) => match (s, t) {
                (Term::Var(v), Term::Var(w)) => bool_gate(at(v) == at(w)),
                (Term::Var(v), Term::Const(a)) | (Term::Const(a), Term::Var(v)) => {
                    G::Lit(self.individuals[a][at(v)])
                }
                (Term::Const(a), Term::Const(b)) => {
                    let (la, lb) = (self.individuals[a].clone(), self.individuals[b].clone());
                    let both: Vec<G> = (0..self.d)
                        .map(|e| self.and(vec![G::Lit(la[e]), G::Lit(lb[e])]))
                        .collect();
                    self.or(both)
                }
            },
            Formula::Not(g) => !self.ground(g, env),
            Formula::And(a, b) => {
                let parts = vec![self.ground(a, env), self.ground(b, env)];
                self.and(parts)
            }
            Formula::Or(a, b) => {
                let parts = vec![self.ground(a, env), self.ground(b, env)];
                self.or(parts)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let parts: Vec<G> = (0..self.d)
                    .map(|e| {
                        let mut inner = env;
                        inner[*v as usize] = Some(e);
                        self.ground(g, inner)
                    })
                    .collect();
                if matches!(f, Formula::Exists(..)) {
                    self.or(parts)
                } else {
                    self.and(parts)
                }
            }
        };
        self.memo.insert(key, g);
        g
    }

    fn or(&mut self, parts: Vec<G>) -> G {
        let mut lits = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                G::True => return G::True,
                G::False => {}
                G::Lit(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => G::False,
            1 => G::Lit(lits[0]),
            _ => {
                let out = self.solver.new_lit();
                let mut clause = lits.clone();
                clause.push(!out);
                self.solver.add_clause(&clause);
                for l in lits {
                    self.solver.add_clause(&[out, !l]);
                }
                G::Lit(out)
            }
        }
    }

    fn and(&mut self, parts: Vec<G>) -> G {
        let negated = parts.into_iter().map(|p| !p).collect();
        !self.or(negated)
    }
}

fn bool_gate(b: bool) -> G {
    if b {
        G::True
    } else {
        G::False
    }
}
