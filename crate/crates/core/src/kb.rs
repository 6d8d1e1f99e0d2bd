//! Knowledge base files.
//!
//! Line oriented; `#` starts a comment. One `space` line must precede any
//! incidence literal.
//!
//! ```text
//! space 10                              # uniform, 1/10 per point
//! space weights 2/5 1/5 2/5             # explicit exact weights
//! inc a = 1111100000                    # exact incidence (bit string)
//! inc b = {3..6}                        # or point-set literal
//! formula ab = a & b                    # named formula, usable afterwards
//! bounds ab inf {3} sup {0..6}          # bounds on a name
//! bounds (a -> b) inf {} sup 1111111111 # or on a parenthesised formula
//! query prob a & ~b
//! query cond a given b
//! query corr a , b
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::logic::{is_identifier, parse, Environment, Formula};
use crate::samplespace::{parse_rational, Incidence, SampleSpace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Prob(Formula),
    Cond(Formula, Formula),
    Corr(Formula, Formula),
}

impl Query {
    pub fn formulas(&self) -> Vec<&Formula> {
        match self {
            Query::Prob(f) => vec![f],
            Query::Cond(a, b) | Query::Corr(a, b) => vec![a, b],
        }
    }
}

/// A knowledge base line, with names already expanded to formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Exact {
        sentence: Formula,
        incidence: Incidence,
    },
    Bounds {
        sentence: Formula,
        inf: Incidence,
        sup: Incidence,
    },
    Formula {
        name: String,
        formula: Formula,
    },
    Query(Query),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    space: SampleSpace,
    declarations: Vec<Declaration>,
    definitions: BTreeMap<String, Formula>,
}

impl KnowledgeBase {
    pub fn parse(text: &str) -> Result<KnowledgeBase> {
        let mut builder = Builder::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            builder
                .line(line)
                .map_err(|message| Error::Kb { line: n + 1, message })?;
        }
        let space = builder.space.ok_or_else(|| Error::Kb {
            line: text.lines().count().max(1),
            message: "missing `space` declaration".into(),
        })?;
        Ok(KnowledgeBase {
            space,
            declarations: builder.declarations,
            definitions: builder.definitions,
        })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn queries(&self) -> impl Iterator<Item = &Query> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Query(q) => Some(q),
            _ => None,
        })
    }

    /// Parses formula text, expanding names defined by `formula` lines.
    pub fn resolve(&self, text: &str) -> Result<Formula> {
        Ok(expand(&parse(text)?, &self.definitions))
    }

    /// Exact incidences declared for atoms.
    pub fn environment(&self) -> Result<Environment> {
        let mut env = Environment::new();
        for decl in &self.declarations {
            if let Declaration::Exact {
                sentence: Formula::Atom(name),
                incidence,
            } = decl
            {
                if let Some(previous) = env.get(name) {
                    if previous != incidence {
                        return Err(Error::Inconsistent(name.clone()));
                    }
                }
                env.insert(name.clone(), incidence.clone())?;
            }
        }
        Ok(env)
    }
}

/// Serialises a space and its atom incidences as knowledge base lines.
pub fn render(space: &SampleSpace, env: &Environment) -> String {
    let mut out = String::new();
    if space.is_uniform() {
        writeln!(out, "space {}", space.size()).unwrap();
    } else {
        let weights: Vec<String> = space.points().iter().map(|p| p.weight.to_string()).collect();
        writeln!(out, "space weights {}", weights.join(" ")).unwrap();
    }
    for (name, inc) in env.iter() {
        writeln!(out, "inc {name} = {inc}").unwrap();
    }
    out
}

fn expand(formula: &Formula, definitions: &BTreeMap<String, Formula>) -> Formula {
    formula.substitute(&|name| definitions.get(name).cloned())
}

#[derive(Default)]
struct Builder {
    space: Option<SampleSpace>,
    declarations: Vec<Declaration>,
    definitions: BTreeMap<String, Formula>,
    atoms_seen: HashSet<String>,
}

type LineResult<T> = std::result::Result<T, String>;

impl Builder {
    fn line(&mut self, line: &str) -> LineResult<()> {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "space" => self.space_line(rest),
            "inc" => {
                let (name, value) = rest.split_once('=').ok_or("expected `inc <name> = <incidence>`")?;
                let sentence = self.target(name.trim())?;
                let incidence = self.incidence(value)?;
                self.declarations.push(Declaration::Exact { sentence, incidence });
                Ok(())
            }
            "bounds" => {
                let (head, sup) = rsplit_word(rest, "sup").ok_or("expected `sup <incidence>`")?;
                let (target, inf) = rsplit_word(head, "inf").ok_or("expected `inf <incidence>`")?;
                let sentence = self.target(target.trim())?;
                let inf = self.incidence(inf)?;
                let sup = self.incidence(sup)?;
                self.declarations.push(Declaration::Bounds { sentence, inf, sup });
                Ok(())
            }
            "formula" => {
                let (name, body) = rest.split_once('=').ok_or("expected `formula <name> = <formula>`")?;
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(format!("`{name}` is not a valid name"));
                }
                if self.definitions.contains_key(name) || self.atoms_seen.contains(name) {
                    return Err(format!("`{name}` is already in use"));
                }
                let formula = self.formula(body)?;
                self.definitions.insert(name.to_string(), formula.clone());
                self.declarations.push(Declaration::Formula {
                    name: name.to_string(),
                    formula,
                });
                Ok(())
            }
            "query" => {
                let (kind, body) = rest
                    .split_once(char::is_whitespace)
                    .ok_or("expected `query <kind> ...`")?;
                let query = match kind {
                    "prob" => Query::Prob(self.formula(body)?),
                    "cond" => {
                        let (a, b) =
                            split_word(body, "given").ok_or("expected `query cond <formula> given <formula>`")?;
                        Query::Cond(self.formula(a)?, self.formula(b)?)
                    }
                    "corr" => {
                        let (a, b) = body
                            .split_once(',')
                            .ok_or("expected `query corr <formula> , <formula>`")?;
                        Query::Corr(self.formula(a)?, self.formula(b)?)
                    }
                    other => return Err(format!("unknown query kind `{other}`")),
                };
                self.declarations.push(Declaration::Query(query));
                Ok(())
            }
            other => Err(format!("unknown keyword `{other}`")),
        }
    }

    fn space_line(&mut self, rest: &str) -> LineResult<()> {
        if self.space.is_some() {
            return Err("duplicate `space` declaration".into());
        }
        let space = match rest.strip_prefix("weights") {
            Some(weights) => {
                let weights = weights
                    .split_whitespace()
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| e.to_string())?;
                SampleSpace::from_weights(weights)
            }
            None => {
                let size: usize = rest.parse().map_err(|_| format!("bad space size `{rest}`"))?;
                SampleSpace::uniform(size)
            }
        };
        self.space = Some(space.map_err(|e| e.to_string())?);
        Ok(())
    }

    fn incidence(&self, text: &str) -> LineResult<Incidence> {
        let space = self.space.as_ref().ok_or("`space` must be declared first")?;
        space.parse_incidence(text).map_err(|e| e.to_string())
    }

    fn formula(&mut self, text: &str) -> LineResult<Formula> {
        let parsed = parse(text.trim()).map_err(|e| e.to_string())?;
        for atom in parsed.atoms() {
            if !self.definitions.contains_key(atom) {
                self.atoms_seen.insert(atom.to_string());
            }
        }
        Ok(expand(&parsed, &self.definitions))
    }

    /// A bare name or a parenthesised formula.
    fn target(&mut self, text: &str) -> LineResult<Formula> {
        if text.starts_with('(') || is_identifier(text) {
            self.formula(text)
        } else {
            Err(format!("expected a name or a parenthesised formula, got `{text}`"))
        }
    }
}

/// Splits at the first standalone occurrence of `word`.
fn split_word<'a>(text: &'a str, word: &str) -> Option<(&'a str, &'a str)> {
    let tokens: Vec<(usize, &str)> = word_spans(text);
    tokens
        .iter()
        .find(|(_, t)| *t == word)
        .map(|&(at, _)| (&text[..at], &text[at + word.len()..]))
}

/// Splits at the last standalone occurrence of `word`.
fn rsplit_word<'a>(text: &'a str, word: &str) -> Option<(&'a str, &'a str)> {
    word_spans(text)
        .iter()
        .rev()
        .find(|(_, t)| *t == word)
        .map(|&(at, _)| (&text[..at], &text[at + word.len()..]))
}

fn word_spans(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        let word_char = c.is_ascii_alphanumeric() || c == '_';
        match (start, word_char) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}
