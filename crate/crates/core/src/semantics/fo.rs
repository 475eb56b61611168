//! Standard translation into the two-variable fragment and a direct
//! recursive evaluator for the resulting formulas.

use std::fmt;

use super::{Model, SemanticsError};
use crate::syntax::{Concept, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "x",
            Var::Y => "y",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(a) => f.write_str(a),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Unary(String, Var),
    Binary(String, Var, Var),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    fn var_eq(a: Var, b: Var) -> Formula {
        Formula::Eq(Term::Var(a), Term::Var(b))
    }

    fn is_binary(&self) -> bool {
        matches!(self, Formula::And(..) | Formula::Or(..))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True
            | Formula::False
            | Formula::Unary(..)
            | Formula::Binary(..)
            | Formula::Eq(..) => 1,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("⊤"),
            Formula::False => f.write_str("⊥"),
            Formula::Unary(a, v) => write!(f, "{a}({v})"),
            Formula::Binary(q, v, w) => write!(f, "{q}({v},{w})"),
            Formula::Eq(s, t) => write!(f, "{s}≈{t}"),
            Formula::Not(g) => write!(f, "¬{g}"),
            Formula::And(a, b) => write!(f, "({a} ∧ {b})"),
            Formula::Or(a, b) => write!(f, "({a} ∨ {b})"),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let q = if matches!(self, Formula::Exists(..)) {
                    '∃'
                } else {
                    '∀'
                };
                if g.is_binary() {
                    write!(f, "{q}{v}{g}")
                } else {
                    write!(f, "{q}{v}({g})")
                }
            }
        }
    }
}

/// `ST_x(c)`: a formula whose only free variable is `x`.
pub fn st_translate(c: &Concept) -> Formula {
    st(c, Var::X)
}

/// `∃x.ST_x(c)`.
pub fn sentence(c: &Concept) -> Formula {
    Formula::exists(Var::X, st_translate(c))
}

fn st(c: &Concept, x: Var) -> Formula {
    let y = x.other();
    match c {
        Concept::Atomic(a) => Formula::Unary(a.clone(), x),
        Concept::Singleton(a) => Formula::Eq(Term::Var(x), Term::Const(a.clone())),
        Concept::Not(c) => Formula::not(st(c, x)),
        Concept::Or(a, b) => Formula::or(st(a, x), st(b, x)),
        Concept::And(a, b) => Formula::and(st(a, x), st(b, x)),
        Concept::Top => Formula::True,
        Concept::Bottom => Formula::False,
        Concept::Exists(r, c) => Formula::exists(y, Formula::and(st_role(r, x, y), st(c, y))),
        Concept::Forall(r, c) => Formula::forall(y, Formula::implies(st_role(r, x, y), st(c, y))),
        Concept::Window(r, c) => Formula::forall(y, Formula::implies(st(c, y), st_role(r, x, y))),
        Concept::Box(c) => Formula::forall(y, st(c, y)),
        Concept::Assertion(a, c) => Formula::exists(
            y,
            Formula::and(Formula::Eq(Term::Var(y), Term::Const(a.clone())), st(c, y)),
        ),
        Concept::RoleAssertion(a, b, r) => Formula::exists(
            x,
            Formula::exists(
                y,
                Formula::and(
                    Formula::and(
                        Formula::Eq(Term::Var(x), Term::Const(a.clone())),
                        Formula::Eq(Term::Var(y), Term::Const(b.clone())),
                    ),
                    st_role(r, x, y),
                ),
            ),
        ),
        Concept::Incl(a, b) => Formula::forall(y, Formula::implies(st(a, y), st(b, y))),
        Concept::RIncl(r, s) => Formula::forall(
            x,
            Formula::forall(y, Formula::implies(st_role(r, x, y), st_role(s, x, y))),
        ),
    }
}

/// `ST_xy(r)` with free variables `x` and `y`.
pub fn st_role(r: &Role, x: Var, y: Var) -> Formula {
    match r {
        Role::Atomic(q) => Formula::Binary(q.clone(), x, y),
        Role::Id => Formula::var_eq(x, y),
        Role::Div => Formula::not(Formula::var_eq(x, y)),
        Role::Top => Formula::True,
        Role::Bottom => Formula::False,
        Role::Or(a, b) => Formula::or(st_role(a, x, y), st_role(b, x, y)),
        Role::And(a, b) => Formula::and(st_role(a, x, y), st_role(b, x, y)),
        Role::Not(r) => Formula::not(st_role(r, x, y)),
        Role::Inverse(r) => st_role(r, y, x),
        Role::Test(c) => Formula::and(Formula::var_eq(x, y), st(c, x)),
        Role::DomRestrict(r, c) => Formula::and(st_role(r, x, y), st(c, x)),
        Role::RanRestrict(r, c) => Formula::and(st_role(r, x, y), st(c, y)),
        Role::LeftCyl(c) => st(c, x),
        Role::RightCyl(c) => st(c, y),
        Role::Cross(a, b) => Formula::and(st(a, x), st(b, y)),
    }
}

/// Evaluates `f` in `m` under the assignment `env` (indexed by `x`, `y`).
pub fn eval_fo(m: &Model, f: &Formula, env: [Option<usize>; 2]) -> Result<bool, SemanticsError> {
    m.validate()?;
    eval(m, f, env)
}

fn eval(m: &Model, f: &Formula, env: [Option<usize>; 2]) -> Result<bool, SemanticsError> {
    let get = |v: Var| env[v.slot()].ok_or(SemanticsError::FreeVariable(v));
    let term = |t: &Term| match t {
        Term::Var(v) => get(*v),
        Term::Const(a) => m.individual(a),
    };
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Unary(a, v) => m.concept_holds(a, get(*v)?),
        Formula::Binary(q, v, w) => m.role_holds(q, get(*v)?, get(*w)?),
        Formula::Eq(s, t) => term(s)? == term(t)?,
        Formula::Not(g) => !eval(m, g, env)?,
        Formula::And(a, b) => eval(m, a, env)? && eval(m, b, env)?,
        Formula::Or(a, b) => eval(m, a, env)? || eval(m, b, env)?,
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let exists = matches!(f, Formula::Exists(..));
            for e in 0..m.domain_size {
                let mut inner = env;
                inner[v.slot()] = Some(e);
                if eval(m, g, inner)? == exists {
                    return Ok(exists);
                }
            }
            !exists
        }
    })
}
