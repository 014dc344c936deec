//! Parser for the ASCII formula and sequent grammar.
//!
//! ```text
//! sequent  := cedent "|-" cedent
//! cedent   := [formula ("," formula)*]
//! formula  := disj ["->" formula]
//! disj     := conj ("|" conj)*
//! conj     := unary ("&" unary)*
//! unary    := "~" unary | ("forall" | "exists") var "." formula
//!           | "bot" | atom | "(" formula ")"
//! ```
//!
//! Lowercase identifiers are propositional variables, uppercase identifiers
//! are predicates. Inside argument lists `a0, a1, ...` are free variables, a
//! lowercase identifier followed by `(` is a function symbol, and any other
//! lowercase identifier must be a bound variable in scope.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sequent::Sequent;
use crate::syntax::{Formula, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Arrow,
    Turnstile,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '~' => Tok::Not,
            '&' => Tok::And,
            '|' if bytes.get(i + 1) == Some(&b'-') => {
                i += 1;
                Tok::Turnstile
            }
            '|' => Tok::Or,
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            other => return Err(Error::Parse { pos: start, msg: format!("unexpected character {other:?}") }),
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn free_index(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('a')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    scope: Vec<String>,
    predicates: BTreeMap<String, usize>,
    functions: BTreeMap<String, usize>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            scope: Vec::new(),
            predicates: BTreeMap::new(),
            functions: BTreeMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn declare(&self, table: &BTreeMap<String, usize>, name: &str, arity: usize, pos: usize) -> Result<()> {
        match table.get(name) {
            Some(&a) if a != arity => Err(Error::Parse {
                pos,
                msg: format!("arity mismatch for {name}: used with {a} and {arity} arguments"),
            }),
            _ => Ok(()),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(fold_right(parts, Formula::or))
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(fold_right(parts, Formula::and))
    }

    fn unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.bump() {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "forall" || name == "exists" => {
                let vpos = self.pos();
                let var = match self.bump() {
                    Tok::Ident(v) => v,
                    _ => return Err(Error::Parse { pos: vpos, msg: "expected a bound variable".into() }),
                };
                if free_index(&var).is_some() || !var.starts_with(|c: char| c.is_ascii_lowercase()) {
                    return Err(Error::Parse { pos: vpos, msg: format!("{var} cannot be used as a bound variable") });
                }
                if matches!(var.as_str(), "bot" | "forall" | "exists") {
                    return Err(Error::Parse { pos: vpos, msg: format!("{var} is reserved") });
                }
                if self.scope.contains(&var) {
                    return Err(Error::Parse { pos: vpos, msg: format!("bound variable {var} is captured by an inner binder") });
                }
                self.expect(Tok::Dot, "'.'")?;
                self.scope.push(var.clone());
                let body = self.formula();
                self.scope.pop();
                let body = body?;
                Ok(if name == "forall" { Formula::forall(&var, body) } else { Formula::exists(&var, body) })
            }
            Tok::Ident(name) if name == "bot" => Ok(Formula::Bot),
            Tok::Ident(name) if name.starts_with(|c: char| c.is_ascii_uppercase()) => {
                let args = if *self.peek() == Tok::LParen { self.args()? } else { Vec::new() };
                self.declare(&self.predicates, &name, args.len(), pos)?;
                self.predicates.insert(name.clone(), args.len());
                Ok(Formula::atom(&name, args))
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    return Err(Error::Parse { pos, msg: format!("propositional variable {name} takes no arguments") });
                }
                if free_index(&name).is_some() || self.scope.contains(&name) {
                    return Err(Error::Parse { pos, msg: format!("term {name} used as a formula") });
                }
                Ok(Formula::prop(&name))
            }
            _ => Err(Error::Parse { pos, msg: "expected a formula".into() }),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "'('")?;
        let mut out = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.term()?);
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(out)
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) => {
                if let Some(n) = free_index(&name) {
                    return Ok(Term::Free(n));
                }
                if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
                    return Err(Error::Parse { pos, msg: format!("{name} is not a term") });
                }
                if *self.peek() == Tok::LParen {
                    let args = self.args()?;
                    self.declare(&self.functions, &name, args.len(), pos)?;
                    self.functions.insert(name.clone(), args.len());
                    return Ok(Term::app(&name, args));
                }
                if self.scope.contains(&name) {
                    Ok(Term::Bound(name.as_str().into()))
                } else {
                    Err(Error::Parse { pos, msg: format!("unbound variable {name}") })
                }
            }
            _ => Err(Error::Parse { pos, msg: "expected a term".into() }),
        }
    }

    fn cedent(&mut self, stop: &Tok) -> Result<Vec<Formula>> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        out.push(self.formula()?);
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.formula()?);
        }
        Ok(out)
    }
}

fn fold_right(mut parts: Vec<Formula>, op: fn(Formula, Formula) -> Formula) -> Formula {
    let last = parts.pop().expect("at least one operand");
    parts.into_iter().rev().fold(last, |acc, f| op(f, acc))
}

/// Parses `Γ |- Δ`, marking every formula.
pub fn parse_sequent(text: &str) -> Result<Sequent> {
    let mut p = Parser::new(text)?;
    let ante = p.cedent(&Tok::Turnstile)?;
    p.expect(Tok::Turnstile, "'|-'")?;
    let succ = p.cedent(&Tok::End)?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(Sequent::marked(ante, succ))
}

/// Parses a single formula.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// Parses a closed term such as `f(a0, a1)`.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let s = parse_sequent("p, q |- p").unwrap();
        assert_eq!(s, Sequent::marked([Formula::prop("p"), Formula::prop("q")], [Formula::prop("p")]));
        let s = parse_sequent("|- p -> p").unwrap();
        assert_eq!(s, Sequent::marked([], [Formula::implies(Formula::prop("p"), Formula::prop("p"))]));
        let s = parse_sequent("forall x. P(x) |- exists y. P(y)").unwrap();
        assert!(s.ante.iter().all(|(_, m)| m) && s.succ.iter().all(|(_, m)| m));
        assert_eq!(s.succ.len(), 1);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("~p & q | r -> s -> t").unwrap();
        let g = Formula::implies(
            Formula::or(Formula::and(Formula::not(Formula::prop("p")), Formula::prop("q")), Formula::prop("r")),
            Formula::implies(Formula::prop("s"), Formula::prop("t")),
        );
        assert_eq!(f, g);
    }

    #[test]
    fn quantifier_extends_right() {
        let f = parse_formula("forall x. P(x) -> q").unwrap();
        assert!(matches!(f, Formula::Forall(..)));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_sequent("p |- (q"), Err(Error::Parse { .. })));
        assert!(parse_sequent("P(a0), P(a0, a1) |-").is_err());
        assert!(parse_sequent("|- P(x)").is_err());
        assert!(parse_sequent("|- forall x. forall x. P(x)").is_err());
        match parse_sequent("p |- q &") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_examples() {
        for text in [
            "p, q |- p",
            "|- ((p -> q) -> p) -> p",
            "forall x. P(x) |- exists y. P(y)",
            "|- ~~(forall x. P(x) | ~P(x))",
            "P(f(a0), a1) |- (exists x. R(x, a0)) & q",
            "|-",
        ] {
            let s = parse_sequent(text).unwrap();
            assert_eq!(parse_sequent(&s.to_string()).unwrap(), s, "{text}");
        }
    }
}
