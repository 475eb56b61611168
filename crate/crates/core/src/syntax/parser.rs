use std::collections::HashMap;

use thiserror::Error;

use super::{Assertion, Concept, ConceptInclusion, Problem, Role, RoleInclusion, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("`{name}` is used both as {first} and as {second}")]
    AlphabetClash {
        name: String,
        first: SymbolKind,
        second: SymbolKind,
    },
}

const KEYWORDS: &[&str] = &[
    "some", "all", "not", "or", "and", "inv", "id", "top", "bot", "box", "win", "sat", "una",
    "div", "test", "dom", "ran", "lcyl", "rcyl", "cross", "assert", "rassert", "incl", "rincl",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Kw(&'static str),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Semi,
    Colon,
    Comma,
    Sub,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Kw(k) => format!("keyword `{k}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Sub => "`<=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        let bump = |line: &mut usize, col: &mut usize, c: char| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(&mut line, &mut col, c);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '.' => Some(Tok::Dot),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            col += 1;
            out.push(Spanned {
                tok,
                line: l,
                col: k,
            });
            continue;
        }
        if c == '<' {
            chars.next();
            col += 1;
            if chars.peek() == Some(&'=') {
                chars.next();
                col += 1;
                out.push(Spanned {
                    tok: Tok::Sub,
                    line: l,
                    col: k,
                });
                continue;
            }
            return Err(syntax(l, k, "expected `<=`"));
        }
        if is_ident_start(c) {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                word.push(c);
                chars.next();
                col += 1;
            }
            let tok = match KEYWORDS.iter().find(|kw| **kw == word) {
                Some(kw) => Tok::Kw(kw),
                None => Tok::Ident(word),
            };
            out.push(Spanned {
                tok,
                line: l,
                col: k,
            });
            continue;
        }
        return Err(syntax(l, k, format!("unexpected character `{c}`")));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        syntax(s.line, s.col, message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_here(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn concept(&mut self) -> PResult<Concept> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(Concept::Atomic(s))
            }
            Tok::LBrace => {
                self.advance();
                let a = self.ident()?;
                self.expect(Tok::RBrace)?;
                Ok(Concept::Singleton(a))
            }
            Tok::Kw("top") => {
                self.advance();
                Ok(Concept::Top)
            }
            Tok::Kw("bot") => {
                self.advance();
                Ok(Concept::Bottom)
            }
            Tok::Kw("not") => {
                self.advance();
                Ok(Concept::not(self.concept()?))
            }
            Tok::Kw("box") => {
                self.advance();
                Ok(Concept::always(self.concept()?))
            }
            Tok::Kw(kw @ ("some" | "all" | "win")) => {
                self.advance();
                let r = self.role()?;
                self.expect(Tok::Dot)?;
                let c = self.concept()?;
                Ok(match kw {
                    "some" => Concept::exists(r, c),
                    "all" => Concept::forall(r, c),
                    _ => Concept::window(r, c),
                })
            }
            Tok::Kw("assert") => {
                self.advance();
                self.expect(Tok::LParen)?;
                let a = self.ident()?;
                self.expect(Tok::Comma)?;
                let c = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(Concept::Assertion(a, Box::new(c)))
            }
            Tok::Kw("rassert") => {
                self.advance();
                self.expect(Tok::LParen)?;
                let a = self.ident()?;
                self.expect(Tok::Comma)?;
                let b = self.ident()?;
                self.expect(Tok::Comma)?;
                let r = self.role()?;
                self.expect(Tok::RParen)?;
                Ok(Concept::RoleAssertion(a, b, r))
            }
            Tok::Kw("incl") => {
                self.advance();
                self.expect(Tok::LParen)?;
                let c = self.concept()?;
                self.expect(Tok::Comma)?;
                let d = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(Concept::Incl(Box::new(c), Box::new(d)))
            }
            Tok::Kw("rincl") => {
                self.advance();
                self.expect(Tok::LParen)?;
                let r = self.role()?;
                self.expect(Tok::Comma)?;
                let s = self.role()?;
                self.expect(Tok::RParen)?;
                Ok(Concept::RIncl(r, s))
            }
            Tok::LParen => {
                self.advance();
                let a = self.concept()?;
                let and = match self.peek() {
                    Tok::Kw("or") => false,
                    Tok::Kw("and") => true,
                    _ => return Err(self.unexpected("`or` or `and`")),
                };
                self.advance();
                let b = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(if and {
                    Concept::and(a, b)
                } else {
                    Concept::or(a, b)
                })
            }
            _ => Err(self.unexpected("a concept")),
        }
    }

    fn role(&mut self) -> PResult<Role> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(Role::Atomic(s))
            }
            Tok::Kw("id") => {
                self.advance();
                Ok(Role::Id)
            }
            Tok::Kw("top") => {
                self.advance();
                Ok(Role::Top)
            }
            Tok::Kw("bot") => {
                self.advance();
                Ok(Role::Bottom)
            }
            Tok::Kw("div") => {
                self.advance();
                Ok(Role::Div)
            }
            Tok::Kw("not") => {
                self.advance();
                Ok(Role::not(self.role()?))
            }
            Tok::Kw("inv") => {
                self.advance();
                self.expect(Tok::LParen)?;
                let r = self.role()?;
                self.expect(Tok::RParen)?;
                Ok(Role::inverse(r))
            }
            Tok::Kw(kw @ ("test" | "lcyl" | "rcyl")) => {
                self.advance();
                self.expect(Tok::LParen)?;
                let c = Box::new(self.concept()?);
                self.expect(Tok::RParen)?;
                Ok(match kw {
                    "test" => Role::Test(c),
                    "lcyl" => Role::LeftCyl(c),
                    _ => Role::RightCyl(c),
                })
            }
            Tok::Kw(kw @ ("dom" | "ran")) => {
                self.advance();
                self.expect(Tok::LParen)?;
                let r = Box::new(self.role()?);
                self.expect(Tok::Comma)?;
                let c = Box::new(self.concept()?);
                self.expect(Tok::RParen)?;
                Ok(if kw == "dom" {
                    Role::DomRestrict(r, c)
                } else {
                    Role::RanRestrict(r, c)
                })
            }
            Tok::Kw("cross") => {
                self.advance();
                self.expect(Tok::LParen)?;
                let c = Box::new(self.concept()?);
                self.expect(Tok::Comma)?;
                let d = Box::new(self.concept()?);
                self.expect(Tok::RParen)?;
                Ok(Role::Cross(c, d))
            }
            Tok::LParen => {
                self.advance();
                let a = self.role()?;
                let and = match self.peek() {
                    Tok::Kw("or") => false,
                    Tok::Kw("and") => true,
                    _ => return Err(self.unexpected("`or` or `and`")),
                };
                self.advance();
                let b = self.role()?;
                self.expect(Tok::RParen)?;
                Ok(if and { Role::and(a, b) } else { Role::or(a, b) })
            }
            _ => Err(self.unexpected("a role")),
        }
    }

    fn at_stmt_end(&self) -> bool {
        matches!(self.peek(), Tok::Semi | Tok::Eof)
    }

    fn end_of_stmt(&mut self) -> PResult<()> {
        if self.at_stmt_end() {
            Ok(())
        } else {
            Err(self.unexpected("`;`"))
        }
    }

    fn try_concept_inclusion(&mut self) -> PResult<ConceptInclusion> {
        let sub = self.concept()?;
        self.expect(Tok::Sub)?;
        let sup = self.concept()?;
        self.end_of_stmt()?;
        Ok(ConceptInclusion { sub, sup })
    }

    fn try_role_inclusion(&mut self) -> PResult<RoleInclusion> {
        let sub = self.role()?;
        self.expect(Tok::Sub)?;
        let sup = self.role()?;
        self.end_of_stmt()?;
        Ok(RoleInclusion { sub, sup })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match (
            self.peek().clone(),
            self.peek_at(1).clone(),
            self.peek_at(2).clone(),
        ) {
            (Tok::Kw("sat"), _, _) => {
                self.advance();
                let c = self.concept()?;
                self.end_of_stmt()?;
                Ok(Stmt::Goal(c))
            }
            (Tok::Kw("una"), _, _) => {
                self.advance();
                self.end_of_stmt()?;
                Ok(Stmt::Una)
            }
            (Tok::Ident(a), Tok::Colon, _) => {
                self.advance();
                self.advance();
                let c = self.concept()?;
                self.end_of_stmt()?;
                Ok(Stmt::Assertion(Assertion::Concept {
                    individual: a,
                    concept: c,
                }))
            }
            (Tok::LParen, Tok::Ident(_), Tok::Comma) => {
                self.advance();
                let a = self.ident()?;
                self.expect(Tok::Comma)?;
                let b = self.ident()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Colon)?;
                let r = self.role()?;
                self.end_of_stmt()?;
                Ok(Stmt::Assertion(Assertion::Role {
                    subject: a,
                    object: b,
                    role: r,
                }))
            }
            _ => {
                let start = self.pos;
                let as_concept = self.try_concept_inclusion();
                let concept_end = self.pos;
                self.pos = start;
                let as_role = self.try_role_inclusion();
                let role_end = self.pos;
                match (as_concept, as_role) {
                    (Ok(c), Ok(r)) => {
                        self.pos = concept_end.max(role_end);
                        Ok(Stmt::Ambiguous(c, r))
                    }
                    (Ok(c), Err(_)) => {
                        self.pos = concept_end;
                        Ok(Stmt::ConceptIncl(c))
                    }
                    (Err(_), Ok(r)) => {
                        self.pos = role_end;
                        Ok(Stmt::RoleIncl(r))
                    }
                    (Err(ec), Err(er)) => {
                        // report whichever reading got further
                        if role_end > concept_end {
                            Err(er)
                        } else {
                            Err(ec)
                        }
                    }
                }
            }
        }
    }
}

enum Stmt {
    Goal(Concept),
    Una,
    Assertion(Assertion),
    ConceptIncl(ConceptInclusion),
    RoleIncl(RoleInclusion),
    /// Statement that parses both as a concept and as a role inclusion.
    Ambiguous(ConceptInclusion, RoleInclusion),
}

#[derive(Default)]
struct Alphabet {
    kinds: HashMap<String, SymbolKind>,
}

impl Alphabet {
    fn add(&mut self, c: &Concept) -> Result<(), ParseError> {
        let mut err = None;
        c.visit_symbols(&mut |name, kind| {
            if err.is_some() {
                return;
            }
            match self.kinds.get(name) {
                Some(&k) if k != kind => {
                    err = Some(ParseError::AlphabetClash {
                        name: name.to_string(),
                        first: k,
                        second: kind,
                    })
                }
                Some(_) => {}
                None => {
                    self.kinds.insert(name.to_string(), kind);
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    fn consistent(&self, c: &Concept) -> bool {
        let mut ok = true;
        c.visit_symbols(&mut |name, kind| {
            if let Some(&k) = self.kinds.get(name) {
                ok &= k == kind;
            }
        });
        ok
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
    })
}

/// Parses a single concept, e.g. `some (Q or not Q) . A`.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut p = parser_for(text)?;
    let c = p.concept()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Alphabet::default().add(&c)?;
    Ok(c)
}

pub fn parse_role(text: &str) -> Result<Role, ParseError> {
    let mut p = parser_for(text)?;
    let r = p.role()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Alphabet::default().add(&Concept::RIncl(r.clone(), Role::Id))?;
    Ok(r)
}

/// Parses a `.albo` problem: `;`-terminated statements (the final `;` may be
/// omitted). A statement that reads both as a concept and a role inclusion is
/// resolved by how its symbols are used elsewhere, defaulting to concepts.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut p = parser_for(text)?;
    let mut stmts = Vec::new();
    while *p.peek() != Tok::Eof {
        if *p.peek() == Tok::Semi {
            p.advance();
            continue;
        }
        stmts.push(p.stmt()?);
        match p.peek() {
            Tok::Semi => {
                p.advance();
            }
            Tok::Eof => {}
            _ => return Err(p.unexpected("`;`")),
        }
    }

    let mut alphabet = Alphabet::default();
    for s in &stmts {
        match s {
            Stmt::Goal(c) => alphabet.add(c)?,
            Stmt::Assertion(a) => alphabet.add(&a.to_concept())?,
            Stmt::ConceptIncl(i) => alphabet.add(&i.to_concept())?,
            Stmt::RoleIncl(i) => alphabet.add(&i.to_concept())?,
            Stmt::Una | Stmt::Ambiguous(..) => {}
        }
    }

    let mut problem = Problem::default();
    for s in stmts {
        match s {
            Stmt::Goal(c) => problem.goals.push(c),
            Stmt::Una => problem.una = true,
            Stmt::Assertion(a) => problem.abox.push(a),
            Stmt::ConceptIncl(i) => problem.tbox.push(i),
            Stmt::RoleIncl(i) => problem.rbox.push(i),
            Stmt::Ambiguous(c, r) => {
                let as_concept = c.to_concept();
                if alphabet.consistent(&as_concept) {
                    alphabet.add(&as_concept)?;
                    problem.tbox.push(c);
                } else {
                    alphabet.add(&r.to_concept())?;
                    problem.rbox.push(r);
                }
            }
        }
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Role {
        Role::atom("Q")
    }

    #[test]
    fn parses_union_with_negated_role() {
        let c = parse_concept("some (Q or not Q) . A").unwrap();
        assert_eq!(
            c,
            Concept::exists(Role::or(q(), Role::not(q())), Concept::atom("A"))
        );
    }

    #[test]
    fn parses_derivation_input() {
        let c = parse_concept("not (not some (Q or not Q).A or some Q.A)").unwrap();
        let expected = Concept::not(Concept::or(
            Concept::not(Concept::exists(
                Role::or(q(), Role::not(q())),
                Concept::atom("A"),
            )),
            Concept::exists(q(), Concept::atom("A")),
        ));
        assert_eq!(c, expected);
    }

    #[test]
    fn missing_filler_is_an_error() {
        let err = parse_concept("some Q .").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Syntax {
                    line: 1,
                    col: 9,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn unbalanced_parentheses_rejected() {
        assert!(parse_concept("(A or B").is_err());
        assert!(parse_concept("(A or B))").is_err());
        assert!(parse_concept("A or B)").is_err());
    }

    #[test]
    fn alphabet_clash() {
        let err = parse_concept("(Q or some Q . A)").unwrap_err();
        assert!(matches!(err, ParseError::AlphabetClash { ref name, .. } if name == "Q"));
        let err = parse_problem("sat {a}; a <= B;").unwrap_err();
        assert!(matches!(err, ParseError::AlphabetClash { .. }));
    }

    #[test]
    fn reserved_prefix_rejected() {
        assert!(parse_concept("$top").is_err());
    }

    #[test]
    fn keywords_are_not_identifiers() {
        assert!(parse_concept("some top . A").is_ok());
        assert!(parse_concept("some . A").is_err());
    }

    #[test]
    fn problem_statements() {
        let text = "# comment\nsat A;\nB <= C;\nhasFriend <= likes;\nsat some likes . top;\n\
                    alice : not B;\n(alice, bob) : hasFriend;\nuna;";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.goals.len(), 2);
        assert_eq!(p.tbox.len(), 1);
        assert_eq!(p.rbox.len(), 1, "{p:?}");
        assert_eq!(p.abox.len(), 2);
        assert!(p.una);
    }

    #[test]
    fn ambiguous_inclusion_defaults_to_concepts() {
        let p = parse_problem("sat A; B <= C").unwrap();
        assert_eq!(p.tbox.len(), 1);
        assert!(p.rbox.is_empty());
    }

    #[test]
    fn role_inclusion_with_role_operators() {
        let p = parse_problem("sat A; inv(R) <= (S or id);").unwrap();
        assert_eq!(p.rbox.len(), 1);
    }

    #[test]
    fn error_positions_track_lines() {
        let err = parse_problem("sat A;\nsat some Q . ;").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Syntax {
                    line: 2,
                    col: 14,
                    ..
                }
            ),
            "{err:?}"
        );
    }
}
