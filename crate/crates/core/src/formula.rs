//! Modal formula syntax trees.
//!
//! The concrete syntax is ASCII only:
//!
//! | construct            | text                 | precedence      |
//! |----------------------|----------------------|-----------------|
//! | constants            | `False`, `True`      |                 |
//! | atoms                | `[a-z][a-zA-Z0-9_]*` |                 |
//! | prefixes             | `Not`, `Box`, `Diam` | tightest        |
//! | conjunction          | `&&`                 | 16, right assoc |
//! | disjunction          | `\|\|`               | 15, right assoc |
//! | implication          | `-->`                | 14, right assoc |
//! | biconditional        | `<->`                | 13, right assoc |
//!
//! Printing emits the minimal parenthesization under the same table, so
//! `parse(&f.to_string()) == Ok(f)` for every formula with valid atom names.

use alloc::borrow::ToOwned;
use alloc::sync::Arc;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A modal formula. Equality is purely syntactic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    False,
    True,
    Atom(String),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
    /// `Diam A` abbreviates `Not Box Not A`; the engines rewrite it away on entry.
    Diam(Arc<Formula>),
}

/// Returns true if `name` is a legal atom name.
pub fn is_atom_name(name: &str) -> bool {
    let mut bytes = name.bytes();
    match bytes.next() {
        Some(b'a'..=b'z') => bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_'),
        _ => false,
    }
}

impl Formula {
    /// Builds an atom.
    ///
    /// # Panics
    ///
    /// Panics if `name` does not match `[a-z][a-zA-Z0-9_]*`.
    pub fn atom(name: &str) -> Formula {
        assert!(is_atom_name(name), "invalid atom name {name:?}");
        Formula::Atom(name.to_owned())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Arc::new(f))
    }

    pub fn diam(f: Formula) -> Formula {
        Formula::Diam(Arc::new(f))
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::False | Formula::True | Formula::Atom(_) => Vec::new(),
            Formula::Not(a) | Formula::Box(a) | Formula::Diam(a) => alloc::vec![&**a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                alloc::vec![&**a, &**b]
            }
        }
    }

    /// Number of nodes: connectives, atoms and constants.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Nesting depth of `Box`/`Diam`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Box(a) | Formula::Diam(a) => 1 + a.modal_depth(),
            _ => self
                .children()
                .into_iter()
                .map(Formula::modal_depth)
                .max()
                .unwrap_or(0),
        }
    }

    /// Reflexive-transitive closure of the immediate-subterm relation.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.contains(self) {
            return;
        }
        out.insert(self.clone());
        for c in self.children() {
            c.collect_subformulas(out);
        }
    }

    /// Subformulas in a fixed order: by size, then structurally.
    pub fn subformula_list(&self) -> Vec<Formula> {
        let mut v: Vec<Formula> = self.subformulas().into_iter().collect();
        v.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        v
    }

    /// Every subformula together with its negation.
    pub fn subsentences(&self) -> BTreeSet<Formula> {
        let subs = self.subformulas();
        let negs: Vec<Formula> = subs.iter().cloned().map(Formula::not).collect();
        let mut out = subs;
        out.extend(negs);
        out
    }

    /// True if `self` occurs as a subterm of `other` (reflexively).
    pub fn is_subformula_of(&self, other: &Formula) -> bool {
        self == other || other.children().into_iter().any(|c| self.is_subformula_of(c))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(name) = self {
            out.insert(name.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Simultaneous substitution of atoms. Atoms missing from `map` are kept.
    pub fn substitute(&self, map: &BTreeMap<String, Formula>) -> Formula {
        let sub = |f: &Formula| Arc::new(f.substitute(map));
        match self {
            Formula::False => Formula::False,
            Formula::True => Formula::True,
            Formula::Atom(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            Formula::Not(a) => Formula::Not(sub(a)),
            Formula::And(a, b) => Formula::And(sub(a), sub(b)),
            Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
            Formula::Imp(a, b) => Formula::Imp(sub(a), sub(b)),
            Formula::Iff(a, b) => Formula::Iff(sub(a), sub(b)),
            Formula::Box(a) => Formula::Box(sub(a)),
            Formula::Diam(a) => Formula::Diam(sub(a)),
        }
    }

    /// Rewrites every `Diam A` into `Not Box Not A`.
    pub fn without_diamonds(&self) -> Formula {
        let sub = |f: &Formula| Arc::new(f.without_diamonds());
        match self {
            Formula::False | Formula::True | Formula::Atom(_) => self.clone(),
            Formula::Not(a) => Formula::Not(sub(a)),
            Formula::And(a, b) => Formula::And(sub(a), sub(b)),
            Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
            Formula::Imp(a, b) => Formula::Imp(sub(a), sub(b)),
            Formula::Iff(a, b) => Formula::Iff(sub(a), sub(b)),
            Formula::Box(a) => Formula::Box(sub(a)),
            Formula::Diam(a) => Formula::not(Formula::boxed(Formula::not(a.without_diamonds()))),
        }
    }

    pub fn is_diamond_free(&self) -> bool {
        !matches!(self, Formula::Diam(_))
            && self.children().into_iter().all(Formula::is_diamond_free)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 13,
            Formula::Imp(..) => 14,
            Formula::Or(..) => 15,
            Formula::And(..) => 16,
            _ => u8::MAX,
        }
    }
}

/// Right-nested conjunction of a list; `True` for the empty list.
pub fn conjoin(list: &[Formula]) -> Formula {
    match list {
        [] => Formula::True,
        [f] => f.clone(),
        [f, rest @ ..] => Formula::and(f.clone(), conjoin(rest)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(out: &mut fmt::Formatter<'_>, f: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(out, "({f})")
            } else {
                write!(out, "{f}")
            }
        }
        let (op, a, b) = match self {
            Formula::False => return out.write_str("False"),
            Formula::True => return out.write_str("True"),
            Formula::Atom(name) => return out.write_str(name),
            Formula::Not(a) | Formula::Box(a) | Formula::Diam(a) => {
                let kw = match self {
                    Formula::Not(_) => "Not ",
                    Formula::Box(_) => "Box ",
                    _ => "Diam ",
                };
                out.write_str(kw)?;
                return operand(out, a, a.precedence() != u8::MAX);
            }
            Formula::And(a, b) => ("&&", a, b),
            Formula::Or(a, b) => ("||", a, b),
            Formula::Imp(a, b) => ("-->", a, b),
            Formula::Iff(a, b) => ("<->", a, b),
        };
        let p = self.precedence();
        operand(out, a, a.precedence() <= p)?;
        write!(out, " {op} ")?;
        operand(out, b, b.precedence() < p)
    }
}

/// Malformed formula text.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    And,
    Or,
    Imp,
    Iff,
    Not,
    Box,
    Diam,
    True,
    False,
    Atom(String),
}

impl Token {
    fn binary_precedence(&self) -> Option<u8> {
        match self {
            Token::And => Some(16),
            Token::Or => Some(15),
            Token::Imp => Some(14),
            Token::Iff => Some(13),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::And => f.write_str("`&&`"),
            Token::Or => f.write_str("`||`"),
            Token::Imp => f.write_str("`-->`"),
            Token::Iff => f.write_str("`<->`"),
            Token::Not => f.write_str("`Not`"),
            Token::Box => f.write_str("`Box`"),
            Token::Diam => f.write_str("`Diam`"),
            Token::True => f.write_str("`True`"),
            Token::False => f.write_str("`False`"),
            Token::Atom(name) => write!(f, "atom `{name}`"),
        }
    }
}

const EXPECT_OPERAND: &[&str] = &["atom", "`True`", "`False`", "`Not`", "`Box`", "`Diam`", "`(`"];
const EXPECT_OPERATOR: &[&str] = &["`&&`", "`||`", "`-->`", "`<->`", "end of input"];

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let symbol = |s: &str| bytes[i..].starts_with(s.as_bytes());
        let tok = if b == b'(' {
            i += 1;
            Token::LParen
        } else if b == b')' {
            i += 1;
            Token::RParen
        } else if symbol("&&") {
            i += 2;
            Token::And
        } else if symbol("||") {
            i += 2;
            Token::Or
        } else if symbol("-->") {
            i += 3;
            Token::Imp
        } else if symbol("<->") {
            i += 3;
            Token::Iff
        } else if b.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            match &text[start..i] {
                "Not" => Token::Not,
                "Box" => Token::Box,
                "Diam" => Token::Diam,
                "True" => Token::True,
                "False" => Token::False,
                word if is_atom_name(word) => Token::Atom(word.to_owned()),
                word => {
                    return Err(ParseError {
                        offset: start,
                        expected: EXPECT_OPERAND.to_vec(),
                        found: alloc::format!("unknown word `{word}`"),
                    })
                }
            }
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: start,
                expected: EXPECT_OPERAND.iter().chain(EXPECT_OPERATOR).copied().collect(),
                found: alloc::format!("character {ch:?}"),
            });
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        match self.tokens.get(self.pos) {
            Some((offset, tok)) => ParseError {
                offset: *offset,
                expected: expected.to_vec(),
                found: tok.to_string(),
            },
            None => ParseError {
                offset: self.end,
                expected: expected.to_vec(),
                found: "end of input".to_string(),
            },
        }
    }

    fn expr(&mut self, min_prec: u8) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(prec) = self.peek().and_then(Token::binary_precedence) {
            if prec < min_prec {
                break;
            }
            let op = self.tokens[self.pos].1.clone();
            self.pos += 1;
            // Right associativity: the right operand may use the same level.
            let rhs = self.expr(prec)?;
            lhs = match op {
                Token::And => Formula::and(lhs, rhs),
                Token::Or => Formula::or(lhs, rhs),
                Token::Imp => Formula::imp(lhs, rhs),
                _ => Formula::iff(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error(EXPECT_OPERAND));
        };
        self.pos += 1;
        match tok {
            Token::Not => Ok(Formula::not(self.unary()?)),
            Token::Box => Ok(Formula::boxed(self.unary()?)),
            Token::Diam => Ok(Formula::diam(self.unary()?)),
            Token::True => Ok(Formula::True),
            Token::False => Ok(Formula::False),
            Token::Atom(name) => Ok(Formula::Atom(name)),
            Token::LParen => {
                let inner = self.expr(0)?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error(&["`&&`", "`||`", "`-->`", "`<->`", "`)`"])),
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.error(EXPECT_OPERAND))
            }
        }
    }
}

/// Parses ASCII formula text.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let f = parser.expr(0)?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error(EXPECT_OPERATOR));
    }
    Ok(f)
}

impl core::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }
    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn parses_distribution_schema() {
        let f = parse("Box (p --> q) --> Box p --> Box q").unwrap();
        let expected = Formula::imp(
            Formula::boxed(Formula::imp(p(), q())),
            Formula::imp(Formula::boxed(p()), Formula::boxed(q())),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn conjunction_binds_tighter_than_disjunction() {
        assert_eq!(parse("p && q || r").unwrap(), Formula::or(Formula::and(p(), q()), r()));
    }

    #[test]
    fn prefixes_nest() {
        let a = Formula::atom("a");
        assert_eq!(
            parse("Not Box Not a").unwrap(),
            Formula::not(Formula::boxed(Formula::not(a)))
        );
    }

    #[test]
    fn iff_is_loosest_and_right_associative() {
        assert_eq!(
            parse("p <-> q <-> r").unwrap(),
            Formula::iff(p(), Formula::iff(q(), r()))
        );
        assert_eq!(
            parse("True <-> False --> False").unwrap(),
            Formula::iff(Formula::True, Formula::imp(Formula::False, Formula::False))
        );
    }

    #[test]
    fn printing_is_minimal() {
        assert_eq!(Formula::imp(Formula::boxed(p()), p()).to_string(), "Box p --> p");
        assert_eq!(Formula::and(p(), Formula::or(q(), r())).to_string(), "p && (q || r)");
        assert_eq!(Formula::diam(p()).to_string(), "Diam p");
        assert_eq!(
            Formula::imp(Formula::imp(p(), q()), r()).to_string(),
            "(p --> q) --> r"
        );
        assert_eq!(Formula::imp(p(), Formula::imp(q(), r())).to_string(), "p --> q --> r");
        assert_eq!(
            Formula::boxed(Formula::not(Formula::and(p(), q()))).to_string(),
            "Box Not (p && q)"
        );
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = parse("p && ").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.expected.contains(&"atom"));
        let e = parse("p q").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.expected.contains(&"`-->`"));
        let e = parse("(p --> q").unwrap_err();
        assert_eq!(e.offset, 8);
        assert!(e.expected.contains(&"`)`"));
        let e = parse("Pee").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse("p # q").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(parse("").is_err());
        assert!(parse(")").is_err());
    }

    #[test]
    fn subformula_examples() {
        let f = Formula::boxed(Formula::imp(p(), q()));
        let subs = f.subformulas();
        assert_eq!(subs.len(), 4);
        assert!(subs.contains(&f) && subs.contains(&Formula::imp(p(), q())));
        assert!(subs.contains(&p()) && subs.contains(&q()));
        assert_eq!(Formula::atom("a").subformulas().len(), 1);
        assert_eq!(Formula::imp(p(), p()).subformulas().len(), 2);
    }

    #[test]
    fn subsentence_examples() {
        let s = p().subsentences();
        assert_eq!(s, [p(), Formula::not(p())].into_iter().collect());
        let bp = Formula::boxed(p());
        let s = bp.subsentences();
        assert_eq!(s.len(), 4);
        assert!(s.contains(&Formula::not(bp.clone())) && s.contains(&Formula::not(p())));
        let s = Formula::False.subsentences();
        assert_eq!(s, [Formula::False, Formula::not(Formula::False)].into_iter().collect());
    }

    #[test]
    fn substitution_examples() {
        let mut map = BTreeMap::new();
        map.insert("p".to_string(), Formula::and(q(), r()));
        let t = parse("Box p --> p").unwrap();
        assert_eq!(t.substitute(&map), parse("Box (q && r) --> q && r").unwrap());

        let mut map = BTreeMap::new();
        map.insert("p".to_string(), Formula::False);
        assert_eq!(q().substitute(&map), q());

        let mut map = BTreeMap::new();
        map.insert("p".to_string(), Formula::boxed(p()));
        assert_eq!(
            parse("p --> p").unwrap().substitute(&map),
            parse("Box p --> Box p").unwrap()
        );
    }

    #[test]
    fn diamonds_are_rewritten() {
        let f = parse("Box (Box a --> Diam a)").unwrap();
        assert_eq!(f.without_diamonds(), parse("Box (Box a --> Not Box Not a)").unwrap());
        assert!(!f.is_diamond_free());
        assert!(f.without_diamonds().is_diamond_free());
    }

    #[test]
    fn conjoin_is_right_nested() {
        assert_eq!(conjoin(&[]), Formula::True);
        assert_eq!(conjoin(&[p()]), p());
        assert_eq!(conjoin(&[p(), q(), r()]), parse("p && q && r").unwrap());
        assert_eq!(conjoin(&[p(), q(), r()]), parse("p && (q && r)").unwrap());
    }

    #[test]
    fn size_and_depth() {
        let f = parse("Box (p --> q) --> Box p --> Box q").unwrap();
        assert_eq!(f.size(), 10);
        assert_eq!(f.modal_depth(), 1);
        assert_eq!(parse("Box Diam Box p").unwrap().modal_depth(), 3);
    }
}
