//! Propositional formulas and their incidences.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! formula := implies
//! implies := or ( "->" implies )?        right associative
//! or      := and ( "|" and )*            left associative
//! and     := unary ( "&" unary )*        left associative
//! unary   := "~" unary | atom | "true" | "false" | "(" formula ")"
//! atom    := letter ( letter | digit | "_" )*
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, ParseError, Result};
use crate::samplespace::{Incidence, SampleSpace};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn parse(text: &str) -> Result<Formula, ParseError> {
        parse(text)
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
        }
    }

    /// Distinct atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Atom(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            _ => self.children().into_iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Replaces atoms for which `lookup` returns a formula.
    pub fn substitute(&self, lookup: &impl Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(name) => lookup(name).unwrap_or_else(|| self.clone()),
            Formula::Not(a) => Formula::not(a.substitute(lookup)),
            Formula::And(a, b) => Formula::and(a.substitute(lookup), b.substitute(lookup)),
            Formula::Or(a, b) => Formula::or(a.substitute(lookup), b.substitute(lookup)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(lookup), b.substitute(lookup)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        let binary = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, right_assoc: bool| {
            let p = self.precedence();
            wrap(f, a, a.precedence() < p || (right_assoc && a.precedence() == p))?;
            write!(f, " {op} ")?;
            wrap(f, b, b.precedence() < p || (!right_assoc && b.precedence() == p))
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(a) => {
                f.write_str("~")?;
                wrap(f, a, a.precedence() < self.precedence())
            }
            Formula::And(a, b) => binary(f, a, "&", b, false),
            Formula::Or(a, b) => binary(f, a, "|", b, false),
            Formula::Implies(a, b) => binary(f, a, "->", b, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Open,
    Close,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::True => f.write_str("`true`"),
            Token::False => f.write_str("`false`"),
            Token::Not => f.write_str("`~`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Implies => f.write_str("`->`"),
            Token::Open => f.write_str("`(`"),
            Token::Close => f.write_str("`)`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let token = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::Open,
            b')' => Token::Close,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Implies
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "true" => Token::True,
                    "false" => Token::False,
                    name => Token::Ident(name.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        tokens.push((start, token));
    }
    Ok(tokens)
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

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Token::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        let Some((_, token)) = self.tokens.get(self.pos).cloned() else {
            return Err(ParseError::new(at, "unexpected end of input"));
        };
        self.pos += 1;
        match token {
            Token::Not => Ok(Formula::not(self.unary()?)),
            Token::True => Ok(Formula::True),
            Token::False => Ok(Formula::False),
            Token::Ident(name) => Ok(Formula::Atom(name)),
            Token::Open => {
                let inner = self.implies()?;
                if !self.eat(&Token::Close) {
                    return Err(ParseError::new(self.offset(), "expected `)`"));
                }
                Ok(inner)
            }
            other => Err(ParseError::new(at, format!("unexpected {other}"))),
        }
    }
}

/// Parses a formula in the concrete syntax described in the module docs.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let formula = parser.implies()?;
    if let Some(token) = parser.peek() {
        return Err(ParseError::new(parser.offset(), format!("unexpected {token}")));
    }
    Ok(formula)
}

/// True if `name` is a legal atom identifier.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "true"
        && name != "false"
}

/// Incidences of atoms, all over one sample space.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    width: Option<usize>,
    atoms: BTreeMap<String, Incidence>,
}

impl Environment {
    pub fn new() -> Self {
        Environment::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, incidence: Incidence) -> Result<()> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::InvalidIncidence(format!("`{name}` is not an identifier")));
        }
        match self.width {
            Some(w) if w != incidence.width() => {
                return Err(Error::WidthMismatch {
                    expected: w,
                    found: incidence.width(),
                })
            }
            _ => self.width = Some(incidence.width()),
        }
        self.atoms.insert(name, incidence);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Incidence> {
        self.atoms.get(name)
    }

    pub fn width(&self) -> Option<usize> {
        self.width
    }

    /// Atoms in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Incidence)> {
        self.atoms.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// The incidence of `formula`, computed compositionally from atom incidences.
pub fn incidence_of(formula: &Formula, env: &Environment, space: &SampleSpace) -> Result<Incidence> {
    if let Some(width) = env.width() {
        if width != space.size() {
            return Err(Error::WidthMismatch {
                expected: space.size(),
                found: width,
            });
        }
    }
    eval(formula, env, space.size())
}

fn eval(formula: &Formula, env: &Environment, width: usize) -> Result<Incidence> {
    Ok(match formula {
        Formula::True => Incidence::full(width),
        Formula::False => Incidence::empty(width),
        Formula::Atom(name) => env.get(name).cloned().ok_or_else(|| Error::UnboundAtom(name.clone()))?,
        Formula::Not(a) => eval(a, env, width)?.complement(),
        Formula::And(a, b) => eval(a, env, width)?.intersection(&eval(b, env, width)?),
        Formula::Or(a, b) => eval(a, env, width)?.union(&eval(b, env, width)?),
        // material implication: (w \ i(A)) ∪ i(B)
        Formula::Implies(a, b) => eval(b, env, width)?.union_complement(&eval(a, env, width)?),
    })
}

/// Truth of `formula` at a single point, reading atom `x` as true iff the
/// point lies in `i(x)`.
pub fn holds_at(formula: &Formula, point: usize, env: &Environment) -> Result<bool> {
    if let Some(width) = env.width() {
        if point >= width {
            return Err(Error::PointOutOfRange { index: point, width });
        }
    }
    Ok(match formula {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(name) => env
            .get(name)
            .ok_or_else(|| Error::UnboundAtom(name.clone()))?
            .contains(point),
        Formula::Not(a) => !holds_at(a, point, env)?,
        Formula::And(a, b) => holds_at(a, point, env)? && holds_at(b, point, env)?,
        Formula::Or(a, b) => holds_at(a, point, env)? || holds_at(b, point, env)?,
        Formula::Implies(a, b) => !holds_at(a, point, env)? || holds_at(b, point, env)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> Formula {
        Formula::atom("a")
    }
    fn b() -> Formula {
        Formula::atom("b")
    }
    fn c() -> Formula {
        Formula::atom("c")
    }

    fn env_ab() -> (SampleSpace, Environment) {
        let w = SampleSpace::uniform(10).unwrap();
        let mut env = Environment::new();
        env.insert("A", Incidence::from_indices(10, 0..=4).unwrap()).unwrap();
        env.insert("B", Incidence::from_indices(10, 3..=6).unwrap()).unwrap();
        (w, env)
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("a & ~b | c").unwrap(),
            Formula::or(Formula::and(a(), Formula::not(b())), c())
        );
        assert_eq!(parse("~(a -> b)").unwrap(), Formula::not(Formula::implies(a(), b())));
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            Formula::implies(a(), Formula::implies(b(), c()))
        );
        assert_eq!(parse("a | b | c").unwrap(), Formula::or(Formula::or(a(), b()), c()));
        assert_eq!(
            parse("a | b -> c & true").unwrap(),
            Formula::implies(Formula::or(a(), b()), Formula::and(c(), Formula::True))
        );
        assert_eq!(parse("~~false").unwrap(), Formula::not(Formula::not(Formula::False)));
        assert_eq!(parse("x_1").unwrap(), Formula::atom("x_1"));
    }

    #[test]
    fn syntax_errors() {
        let err = parse("a &").unwrap_err();
        assert_eq!(err.position, 3);
        assert_eq!(parse("(a | b").unwrap_err().position, 6);
        assert_eq!(parse("a b").unwrap_err().position, 2);
        assert_eq!(parse("a # b").unwrap_err().position, 2);
        assert_eq!(parse("_a").unwrap_err().position, 0);
        assert!(parse("").is_err());
        assert!(parse("a - b").is_err());
    }

    #[test]
    fn printing() {
        for text in [
            "a & ~b | c",
            "~(a -> b)",
            "a -> b -> c",
            "(a -> b) -> c",
            "a & (b & c)",
            "~~a",
            "true | false",
        ] {
            assert_eq!(parse(text).unwrap().to_string(), text);
        }
        assert_eq!(parse("((a)) & (b)").unwrap().to_string(), "a & b");
    }

    #[test]
    fn incidence_examples() {
        let (w, env) = env_ab();
        assert_eq!(incidence_of(&Formula::True, &env, &w).unwrap(), w.full());
        assert_eq!(incidence_of(&Formula::False, &env, &w).unwrap(), w.empty());
        assert_eq!(
            incidence_of(&parse("A & B").unwrap(), &env, &w).unwrap(),
            Incidence::from_indices(10, [3, 4]).unwrap()
        );
        assert_eq!(
            incidence_of(&parse("~A").unwrap(), &env, &w).unwrap(),
            Incidence::from_indices(10, 5..=9).unwrap()
        );
        assert_eq!(
            incidence_of(&parse("A -> B").unwrap(), &env, &w).unwrap(),
            Incidence::from_indices(10, 3..=9).unwrap()
        );
        assert!(matches!(
            incidence_of(&parse("A & C").unwrap(), &env, &w),
            Err(Error::UnboundAtom(name)) if name == "C"
        ));
        let w5 = SampleSpace::uniform(5).unwrap();
        assert!(incidence_of(&Formula::True, &env, &w5).is_err());
    }

    #[test]
    fn pointwise_examples() {
        let (_, env) = env_ab();
        assert!(holds_at(&Formula::True, 7, &env).unwrap());
        assert!(holds_at(&parse("A & B").unwrap(), 3, &env).unwrap());
        assert!(!holds_at(&parse("~A").unwrap(), 3, &env).unwrap());
        assert!(matches!(
            holds_at(&parse("A").unwrap(), 10, &env),
            Err(Error::PointOutOfRange { .. })
        ));
        assert!(holds_at(&parse("Z").unwrap(), 0, &env).is_err());
    }

    #[test]
    fn environment_rejects_mixed_widths() {
        let mut env = Environment::new();
        env.insert("a", Incidence::empty(3)).unwrap();
        assert!(env.insert("b", Incidence::empty(4)).is_err());
        assert!(env.insert("true", Incidence::empty(3)).is_err());
    }

    #[test]
    fn atoms_and_substitution() {
        let f = parse("a & (b | a) -> c").unwrap();
        assert_eq!(f.atoms(), vec!["a", "b", "c"]);
        assert_eq!(f.depth(), 4);
        let g = f.substitute(&|name| (name == "c").then(|| parse("x | y").unwrap()));
        assert_eq!(g.to_string(), "a & (b | a) -> x | y");
    }

    pub(crate) fn formula_strategy(atoms: usize, depth: u32) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            1 => Just(Formula::True),
            1 => Just(Formula::False),
            6 => (0..atoms).prop_map(|k| Formula::atom(format!("p{k}"))),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in formula_strategy(4, 5)) {
            prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn evaluation_matches_pointwise_truth(
            f in formula_strategy(3, 5),
            bits in prop::collection::vec(any::<u16>(), 3),
        ) {
            let w = SampleSpace::uniform(16).unwrap();
            let mut env = Environment::new();
            for (k, word) in bits.iter().enumerate() {
                let inc = Incidence::from_indices(16, (0..16).filter(|j| word >> j & 1 == 1)).unwrap();
                env.insert(format!("p{k}"), inc).unwrap();
            }
            let inc = incidence_of(&f, &env, &w).unwrap();
            for j in 0..16 {
                prop_assert_eq!(inc.contains(j), holds_at(&f, j, &env).unwrap());
            }
        }
    }
}
