#![allow(dead_code)]

use std::path::{Path, PathBuf};

use albo_core::semantics::Model;
use albo_core::syntax::{length, Concept, Role};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const CONCEPTS: [&str; 2] = ["A", "B"];
pub const ROLES: [&str; 2] = ["Q", "R"];
pub const INDIVIDUALS: [&str; 2] = ["a", "b"];

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every corpus file with its `# expect:` verdict, sorted by name.
pub fn corpus() -> Vec<(PathBuf, String, bool)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "albo"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let sat = text
                .lines()
                .find_map(|l| l.strip_prefix("# expect: "))
                .expect("expectation header")
                .trim()
                == "sat";
            (p, text, sat)
        })
        .collect()
}

fn pick(names: &'static [&'static str]) -> BoxedStrategy<String> {
    proptest::sample::select(names)
        .prop_map(str::to_string)
        .boxed()
}

/// Knobs for the generators below.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub concepts: usize,
    pub roles: usize,
    pub individuals: usize,
    pub depth: u32,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        concepts: 2,
        roles: 2,
        individuals: 1,
        depth: 4,
    };
}

fn leaf(shape: Shape) -> BoxedStrategy<Concept> {
    let atoms = pick(&CONCEPTS[..shape.concepts]).prop_map(Concept::Atomic);
    if shape.individuals == 0 {
        atoms.boxed()
    } else {
        prop_oneof![
            3 => atoms,
            1 => pick(&INDIVIDUALS[..shape.individuals]).prop_map(Concept::Singleton),
        ]
        .boxed()
    }
}

/// Core roles, inverses anywhere.
pub fn core_role(shape: Shape) -> BoxedStrategy<Role> {
    let atoms = prop_oneof![
        4 => pick(&ROLES[..shape.roles]).prop_map(Role::Atomic),
        1 => Just(Role::Id),
    ];
    atoms
        .prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Role::or(a, b)),
                inner.clone().prop_map(Role::not),
                inner.prop_map(Role::inverse),
            ]
        })
        .boxed()
}

fn core_and(a: Concept, b: Concept) -> Concept {
    Concept::not(Concept::or(Concept::not(a), Concept::not(b)))
}

fn core_forall(r: Role, c: Concept) -> Concept {
    Concept::not(Concept::exists(r, Concept::not(c)))
}

/// Core concepts over the alphabet described by `shape`. Conjunctions and
/// universals are spelled out in core syntax so that unsatisfiable samples
/// are not rare.
pub fn core_concept(shape: Shape) -> BoxedStrategy<Concept> {
    let role = core_role(shape);
    leaf(shape)
        .prop_recursive(shape.depth, 24, 2, move |inner| {
            prop_oneof![
                2 => inner.clone().prop_map(Concept::not),
                2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)),
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| core_and(a, b)),
                2 => (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::exists(r, c)),
                2 => (role.clone(), inner).prop_map(|(r, c)| core_forall(r, c)),
            ]
        })
        .boxed()
}

/// Core concepts of length at most `max_len`.
pub fn short_core_concept(shape: Shape, max_len: usize) -> BoxedStrategy<Concept> {
    core_concept(shape)
        .prop_filter("too long", move |c| length(c) <= max_len)
        .boxed()
}

/// Roles using every constructor, restriction operators included.
pub fn full_role(concept: BoxedStrategy<Concept>, shape: Shape) -> BoxedStrategy<Role> {
    let atoms = prop_oneof![
        4 => pick(&ROLES[..shape.roles]).prop_map(Role::Atomic),
        1 => Just(Role::Id),
        1 => Just(Role::Top),
        1 => Just(Role::Bottom),
        1 => Just(Role::Div),
    ];
    let c = concept;
    atoms
        .prop_recursive(2, 6, 2, move |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Role::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Role::and(a, b)),
                inner.clone().prop_map(Role::not),
                inner.clone().prop_map(Role::inverse),
                c.clone().prop_map(|c| Role::Test(Box::new(c))),
                (inner.clone(), c.clone())
                    .prop_map(|(r, c)| Role::DomRestrict(Box::new(r), Box::new(c))),
                (inner, c.clone()).prop_map(|(r, c)| Role::RanRestrict(Box::new(r), Box::new(c))),
                c.clone().prop_map(|c| Role::LeftCyl(Box::new(c))),
                c.clone().prop_map(|c| Role::RightCyl(Box::new(c))),
                (c.clone(), c.clone()).prop_map(|(a, b)| Role::Cross(Box::new(a), Box::new(b))),
            ]
        })
        .boxed()
}

/// Concepts using every constructor of the abstract syntax.
pub fn full_concept(shape: Shape) -> BoxedStrategy<Concept> {
    let base = prop_oneof![leaf(shape), Just(Concept::Top), Just(Concept::Bottom)].boxed();
    base.prop_recursive(shape.depth, 32, 2, move |inner| {
        let role = full_role(leaf(shape), shape);
        let ind = pick(&INDIVIDUALS[..shape.individuals.max(1)]);
        prop_oneof![
            inner.clone().prop_map(Concept::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::and(a, b)),
            (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::exists(r, c)),
            (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::forall(r, c)),
            (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::window(r, c)),
            inner.clone().prop_map(Concept::always),
            (ind.clone(), inner.clone()).prop_map(|(a, c)| Concept::Assertion(a, Box::new(c))),
            (ind.clone(), ind, role.clone()).prop_map(|(a, b, r)| Concept::RoleAssertion(a, b, r)),
            (inner.clone(), inner).prop_map(|(a, b)| Concept::Incl(Box::new(a), Box::new(b))),
            (role.clone(), role).prop_map(|(r, s)| Concept::RIncl(r, s)),
        ]
    })
    .boxed()
}

/// A restriction-family role over core concepts.
pub fn restriction_role(shape: Shape) -> BoxedStrategy<Role> {
    let c = core_concept(Shape { depth: 2, ..shape });
    let r = core_role(shape);
    prop_oneof![
        c.clone().prop_map(|c| Role::Test(Box::new(c))),
        (r.clone(), c.clone()).prop_map(|(r, c)| Role::DomRestrict(Box::new(r), Box::new(c))),
        (r, c.clone()).prop_map(|(r, c)| Role::RanRestrict(Box::new(r), Box::new(c))),
        c.clone().prop_map(|c| Role::LeftCyl(Box::new(c))),
        c.clone().prop_map(|c| Role::RightCyl(Box::new(c))),
        (c.clone(), c).prop_map(|(a, b)| Role::Cross(Box::new(a), Box::new(b))),
    ]
    .boxed()
}

/// Core concept with exactly one restriction operator under a quantifier.
pub fn restricted_concept(shape: Shape) -> BoxedStrategy<Concept> {
    let small = core_concept(Shape { depth: 2, ..shape });
    (restriction_role(shape), small.clone(), small, 0..4usize)
        .prop_map(|(r, filler, other, wrap)| {
            let q = Concept::exists(r, filler);
            match wrap {
                0 => q,
                1 => Concept::not(q),
                2 => core_and(q, other),
                _ => core_and(Concept::not(q), other),
            }
        })
        .boxed()
}

/// Random interpretation of the fixed alphabet over `1..=max_domain` elements.
pub fn model(max_domain: usize) -> BoxedStrategy<Model> {
    (1..=max_domain)
        .prop_flat_map(|n| {
            let sets = proptest::collection::vec(any::<bool>(), n);
            let rels = proptest::collection::vec(any::<bool>(), n * n);
            (
                Just(n),
                [sets.clone(), sets],
                [rels.clone(), rels],
                [0..n, 0..n],
            )
        })
        .prop_map(|(n, sets, rels, inds)| {
            let mut m = Model::new(n);
            for (name, bits) in CONCEPTS.iter().zip(&sets) {
                m = m.with_concept(name, (0..n).filter(|&i| bits[i]));
            }
            for (name, bits) in ROLES.iter().zip(&rels) {
                m = m.with_role(
                    name,
                    (0..n * n).filter(|&i| bits[i]).map(|i| (i / n, i % n)),
                );
            }
            for (name, &e) in INDIVIDUALS.iter().zip(&inds) {
                m = m.with_individual(name, e);
            }
            m
        })
        .boxed()
}

/// Draws `count` values from `strategy` with a fixed seed.
pub fn sample<T: std::fmt::Debug>(strategy: &BoxedStrategy<T>, count: usize, seed: u8) -> Vec<T> {
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}
