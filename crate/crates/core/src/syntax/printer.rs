use super::{Concept, Role};

/// Prints a concept in the surface syntax accepted by [`super::parse_concept`].
/// Binary operators are always parenthesised and nothing is simplified.
pub fn print_concept(c: &Concept) -> String {
    let mut out = String::new();
    write_concept(&mut out, c);
    out
}

pub fn print_role(r: &Role) -> String {
    let mut out = String::new();
    write_role(&mut out, r);
    out
}

fn write_concept(out: &mut String, c: &Concept) {
    match c {
        Concept::Atomic(n) => out.push_str(n),
        Concept::Singleton(a) => {
            out.push('{');
            out.push_str(a);
            out.push('}');
        }
        Concept::Not(c) => {
            out.push_str("not ");
            write_concept(out, c);
        }
        Concept::Or(a, b) => binary(out, a, "or", b),
        Concept::And(a, b) => binary(out, a, "and", b),
        Concept::Exists(r, c) => quantifier(out, "some", r, c),
        Concept::Forall(r, c) => quantifier(out, "all", r, c),
        Concept::Window(r, c) => quantifier(out, "win", r, c),
        Concept::Top => out.push_str("top"),
        Concept::Bottom => out.push_str("bot"),
        Concept::Box(c) => {
            out.push_str("box ");
            write_concept(out, c);
        }
        Concept::Assertion(a, c) => {
            out.push_str("assert(");
            out.push_str(a);
            out.push_str(", ");
            write_concept(out, c);
            out.push(')');
        }
        Concept::RoleAssertion(a, b, r) => {
            out.push_str("rassert(");
            out.push_str(a);
            out.push_str(", ");
            out.push_str(b);
            out.push_str(", ");
            write_role(out, r);
            out.push(')');
        }
        Concept::Incl(a, b) => {
            out.push_str("incl(");
            write_concept(out, a);
            out.push_str(", ");
            write_concept(out, b);
            out.push(')');
        }
        Concept::RIncl(r, s) => {
            out.push_str("rincl(");
            write_role(out, r);
            out.push_str(", ");
            write_role(out, s);
            out.push(')');
        }
    }
}

fn binary(out: &mut String, a: &Concept, op: &str, b: &Concept) {
    out.push('(');
    write_concept(out, a);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_concept(out, b);
    out.push(')');
}

fn quantifier(out: &mut String, kw: &str, r: &Role, c: &Concept) {
    out.push_str(kw);
    out.push(' ');
    write_role(out, r);
    out.push_str(" . ");
    write_concept(out, c);
}

fn write_role(out: &mut String, r: &Role) {
    match r {
        Role::Atomic(n) => out.push_str(n),
        Role::Id => out.push_str("id"),
        Role::Top => out.push_str("top"),
        Role::Bottom => out.push_str("bot"),
        Role::Div => out.push_str("div"),
        Role::Or(a, b) | Role::And(a, b) => {
            out.push('(');
            write_role(out, a);
            out.push_str(if matches!(r, Role::Or(..)) {
                " or "
            } else {
                " and "
            });
            write_role(out, b);
            out.push(')');
        }
        Role::Not(r) => {
            out.push_str("not ");
            write_role(out, r);
        }
        Role::Inverse(r) => {
            out.push_str("inv(");
            write_role(out, r);
            out.push(')');
        }
        Role::Test(c) => call1(out, "test", c),
        Role::LeftCyl(c) => call1(out, "lcyl", c),
        Role::RightCyl(c) => call1(out, "rcyl", c),
        Role::DomRestrict(inner, c) | Role::RanRestrict(inner, c) => {
            out.push_str(if matches!(r, Role::DomRestrict(..)) {
                "dom("
            } else {
                "ran("
            });
            write_role(out, inner);
            out.push_str(", ");
            write_concept(out, c);
            out.push(')');
        }
        Role::Cross(a, b) => {
            out.push_str("cross(");
            write_concept(out, a);
            out.push_str(", ");
            write_concept(out, b);
            out.push(')');
        }
    }
}

fn call1(out: &mut String, kw: &str, c: &Concept) {
    out.push_str(kw);
    out.push('(');
    write_concept(out, c);
    out.push(')');
}
