use super::*;
use crate::engine::{Branch, Engine};
use crate::normalize::normalize_concept;
use crate::syntax::parse_concept;

fn p(text: &str) -> Concept {
    parse_concept(text).unwrap()
}

fn n(text: &str) -> Concept {
    normalize_concept(&p(text)).concept
}

fn open_leaves(e: &mut Engine, root: Branch) -> Vec<Branch> {
    let mut stack = vec![root];
    let mut out = Vec::new();
    while let Some(mut b) = stack.pop() {
        while !b.is_closed() {
            match e.schedule(&mut b) {
                None => {
                    out.push(b.clone());
                    break;
                }
                Some(inst) => {
                    if let Some(r) = e.apply_in_place(&mut b, &inst).unwrap().right {
                        stack.push(r);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn box_exists_on_reflexive_point() {
    let m = Model::new(1)
        .with_concept("A", [0])
        .with_role("Q", [(0, 0)]);
    let boxed = n("box some Q . A");
    assert_eq!(eval_concept(&m, &boxed).unwrap(), BTreeSet::from([0]));
}

#[test]
fn complement_and_negated_role() {
    let m = Model::new(2).with_concept("A", [0]);
    assert_eq!(eval_concept(&m, &p("not A")).unwrap(), BTreeSet::from([1]));
    let m = Model::new(1).with_role("Q", [(0, 0)]);
    assert!(eval_concept(&m, &n("some not Q . top")).unwrap().is_empty());
}

#[test]
fn satisfied_examples() {
    let m = Model::new(1);
    assert!(satisfied(&m, &n("top")).unwrap());
    assert!(!satisfied(&m, &p("A")).unwrap());
    assert_eq!(
        satisfied(&m, &p("{a}")),
        Err(SemanticsError::UnboundIndividual("a".into()))
    );
    assert_eq!(
        satisfied(&Model::new(0), &p("A")),
        Err(SemanticsError::EmptyDomain)
    );
}

#[test]
fn restriction_operators() {
    let m = Model::new(2)
        .with_concept("A", [1])
        .with_role("Q", [(0, 1), (1, 0)]);
    let pairs = |r: &str| eval_role(&m, &crate::syntax::parse_role(r).unwrap()).unwrap();
    assert_eq!(pairs("test(A)"), BTreeSet::from([(1, 1)]));
    assert_eq!(pairs("dom(Q, A)"), BTreeSet::from([(1, 0)]));
    assert_eq!(pairs("ran(Q, A)"), BTreeSet::from([(0, 1)]));
    assert_eq!(pairs("lcyl(A)"), BTreeSet::from([(1, 0), (1, 1)]));
    assert_eq!(pairs("rcyl(A)"), BTreeSet::from([(0, 1), (1, 1)]));
    assert_eq!(pairs("cross(A, not A)"), BTreeSet::from([(1, 0)]));
    assert_eq!(pairs("div"), BTreeSet::from([(0, 1), (1, 0)]));
    assert_eq!(pairs("inv(ran(Q, A))"), BTreeSet::from([(1, 0)]));
}

#[test]
fn translation_examples() {
    assert_eq!(st_translate(&p("A")).to_string(), "A(x)");
    assert_eq!(
        st_translate(&p("some id . {a}")).to_string(),
        "∃y(x≈y ∧ y≈a)"
    );
    assert_eq!(
        st_translate(&p("not some not Q . A")).to_string(),
        "¬∃y(¬Q(x,y) ∧ A(y))"
    );
    assert_eq!(
        st_translate(&p("some inv(Q) . some Q . B")).to_string(),
        "∃y(Q(y,x) ∧ ∃x(Q(y,x) ∧ B(x)))"
    );
}

#[test]
fn translation_agrees_on_small_model() {
    let m = Model::new(2)
        .with_concept("A", [1])
        .with_role("Q", [(0, 1)])
        .with_individual("a", 1);
    for text in [
        "some Q . A",
        "not some not Q . A",
        "all Q . {a}",
        "win inv(Q) . top",
        "box A",
    ] {
        let c = p(text);
        let direct = satisfied(&m, &c).unwrap();
        let fo = eval_fo(&m, &sentence(&c), [None, None]).unwrap();
        assert_eq!(direct, fo, "{text}");
    }
}

#[test]
fn free_variable_is_an_error() {
    let m = Model::new(1);
    assert_eq!(
        eval_fo(&m, &st_translate(&p("A")), [None, None]),
        Err(SemanticsError::FreeVariable(Var::X))
    );
}

#[test]
fn oracle_examples() {
    let m = enumerate_model(&p("some Q . A"), 1).unwrap();
    assert_eq!(m.domain_size, 1);
    assert_eq!(m.concepts["A"], BTreeSet::from([0]));
    assert_eq!(m.roles["Q"], BTreeSet::from([(0, 0)]));
    assert_eq!(enumerate_model(&n("(A and not A)"), 3), None);
    let box_clash = n("not (some (Q' or not Q').not some Q.A or not some Q''.not some Q.A)");
    assert_eq!(enumerate_model(&box_clash, 3), None);
}

#[test]
fn oracle_is_canonical() {
    // Smallest counter value: A first, then Q, all zero where possible.
    let m = enumerate_model(&p("some Q . not A"), 2).unwrap();
    assert_eq!(m.domain_size, 1);
    assert!(m.concepts["A"].is_empty());
    let m = enumerate_model(&p("(A and some Q . not A)"), 3).unwrap();
    assert_eq!(m.domain_size, 2);
    assert_eq!(m.concepts["A"], BTreeSet::from([1]));
    assert_eq!(m.roles["Q"], BTreeSet::from([(1, 0)]));
    let m = enumerate_model(&p("(not {a} and {b})"), 3).unwrap();
    assert_eq!(m.individuals["a"], 0);
    assert_eq!(m.individuals["b"], 1);
}

#[test]
fn model_text_round_trip() {
    let m = Model::new(2)
        .with_concept("B", [])
        .with_concept("A", [1, 0])
        .with_role("Q", [(1, 1), (0, 1)])
        .with_individual("a", 0);
    let text = write_model(&m);
    assert_eq!(
        text,
        "domain 2\nconcept A: 0 1\nconcept B:\nrole Q: (0,1) (1,1)\nind a = 0\n"
    );
    assert_eq!(parse_model(&text).unwrap(), m);
    assert!(parse_model("concept A: 0\n").is_err());
    assert!(parse_model("domain 1\nconcept A: 3\n").is_err());
    assert_eq!(parse_model("domain 1\nfoo\n").unwrap_err().line, 2);
}

#[test]
fn extraction_from_somewhere_branches() {
    let input = p("not (not some (Q or not Q).A or some Q.A)");
    let mut e = Engine::default();
    let root = e
        .init(&n("not (not some (Q or not Q).A or some Q.A)"))
        .unwrap();
    let leaves = open_leaves(&mut e, root);
    assert!(!leaves.is_empty());
    let mut sizes = Vec::new();
    for b in &leaves {
        let x = extract_model(&e, b).unwrap();
        assert!(check_reflection(&e, b, &x).unwrap().is_empty());
        assert!(eval_concept(&x.model, &input)
            .unwrap()
            .contains(&x.element(crate::engine::Individual::ROOT)));
        sizes.push(x.model.domain_size);
        if x.model.domain_size == 2 {
            assert_eq!(x.model.concepts["A"], BTreeSet::from([1]));
            assert!(x.model.roles["Q"].is_empty());
        }
    }
    assert!(sizes.contains(&1), "{sizes:?}");
    assert!(sizes.contains(&2), "{sizes:?}");
}

#[test]
fn extraction_merges_equal_individuals() {
    let mut e = Engine::default();
    let root = e.init(&n("(A and some Q . {b})")).unwrap();
    let leaves = open_leaves(&mut e, root);
    let merged = leaves
        .iter()
        .map(|b| extract_model(&e, b).unwrap())
        .find(|x| x.model.domain_size == 1)
        .expect("merge branch stays open");
    assert_eq!(
        merged.model.individuals["a0"],
        merged.model.individuals["b"]
    );
    assert_eq!(merged.model.roles["Q"], BTreeSet::from([(0, 0)]));
}

#[test]
fn extraction_errors() {
    let mut e = Engine::default();
    let b = e.init(&n("some Q . A")).unwrap();
    assert!(matches!(
        extract_model(&e, &b),
        Err(ExtractError::NotExpanded(_))
    ));
    let root = e.init(&n("(A and not A)")).unwrap();
    let leaves = open_leaves(&mut e, root);
    assert!(leaves.is_empty());
    let mut b = e.init(&n("(A and not A)")).unwrap();
    while let Some(inst) = e.schedule(&mut b) {
        e.apply_in_place(&mut b, &inst).unwrap();
        if b.is_closed() {
            break;
        }
    }
    assert_eq!(extract_model(&e, &b).unwrap_err(), ExtractError::Closed);
}
