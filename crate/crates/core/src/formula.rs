//! Propositional formulas over a declared variable universe.
//!
//! Concrete syntax, loosest to tightest binding:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*        left-associative
//! imp     := or ("->" imp)?          right-associative
//! or      := and ("|" and)*
//! and     := not ("&" not)*
//! not     := "!" not | atom
//! atom    := ident | "true" | "false" | "(" formula ")"
//! ident   := [A-Za-z_][A-Za-z0-9_]*  (except the keywords true/false)
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::worlds::World;

/// Ordered set of distinct variable names. Position `i` is variable `x_{i+1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut universe = Self::default();
        for name in names {
            let name = name.into();
            if universe.index.contains_key(&name) {
                return Err(Error::DuplicateVariable(name));
            }
            universe.insert(name)?;
        }
        Ok(universe)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Returns the index of `name`, appending it when absent.
    pub fn insert(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return Ok(i);
        }
        if !is_identifier(&name) {
            return Err(Error::Parse {
                position: 0,
                message: format!("`{name}` is not a valid variable name"),
            });
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        Ok(i)
    }

    /// A name derived from `base` that is not yet in the universe.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.index.contains_key(base) {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|candidate| !self.index.contains_key(candidate))
            .expect("unbounded search")
    }

    /// Appends a fresh variable derived from `base` and returns its index.
    pub fn add_fresh(&mut self, base: &str) -> usize {
        let name = self.fresh_name(base);
        self.insert(name).expect("fresh names are valid identifiers")
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "true" && name != "false"
}

/// Propositional formula. `And`/`Or` always hold at least two children when
/// built by the parser or by [`Formula::and_all`] / [`Formula::or_all`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(usize),
    Const(bool),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(index: usize) -> Self {
        Formula::Var(index)
    }

    /// The literal `x` when `value` is true, `!x` otherwise.
    pub fn literal(index: usize, value: bool) -> Self {
        if value {
            Formula::Var(index)
        } else {
            Formula::negate(Formula::Var(index))
        }
    }

    pub fn negate(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Conjunction; `true` for no operands, the operand itself for one.
    pub fn and_all(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Const(true),
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction; `false` for no operands, the operand itself for one.
    pub fn or_all(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Const(false),
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// Conjunction of literals that pins `world` exactly.
    pub fn world_conjunction(world: &World) -> Self {
        Formula::and_all((0..world.len()).map(|i| Formula::literal(i, world.get(i))).collect())
    }

    pub fn evaluate(&self, world: &World) -> bool {
        match self {
            Formula::Var(i) => world.get(*i),
            Formula::Const(b) => *b,
            Formula::Not(f) => !f.evaluate(world),
            Formula::And(fs) => fs.iter().all(|f| f.evaluate(world)),
            Formula::Or(fs) => fs.iter().any(|f| f.evaluate(world)),
            Formula::Implies(a, b) => !a.evaluate(world) || b.evaluate(world),
            Formula::Iff(a, b) => a.evaluate(world) == b.evaluate(world),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Formula::Var(i) => {
                out.insert(*i);
            }
            Formula::Const(_) => {}
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Largest variable index plus one (0 for closed formulas).
    pub fn var_bound(&self) -> usize {
        self.free_variables().last().map_or(0, |&i| i + 1)
    }

    /// Rewrites every variable index through `map`.
    pub fn remap(&self, map: &impl Fn(usize) -> usize) -> Formula {
        match self {
            Formula::Var(i) => Formula::Var(map(*i)),
            Formula::Const(b) => Formula::Const(*b),
            Formula::Not(f) => Formula::negate(f.remap(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.remap(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.remap(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.remap(map), b.remap(map)),
            Formula::Iff(a, b) => Formula::iff(a.remap(map), b.remap(map)),
        }
    }

    /// Parses against a fixed universe; unknown identifiers are an error.
    pub fn parse(text: &str, universe: &VarUniverse) -> Result<Formula> {
        Parser::new(text, Resolver::Fixed(universe))?.parse_all()
    }

    /// Parses, appending unseen identifiers to `universe` in order of first appearance.
    pub fn parse_extending(text: &str, universe: &mut VarUniverse) -> Result<Formula> {
        Parser::new(text, Resolver::Auto(universe))?.parse_all()
    }

    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> DisplayFormula<'a> {
        DisplayFormula {
            formula: self,
            universe,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(_) => 3,
            Formula::And(_) => 4,
            Formula::Not(_) => 5,
            Formula::Var(_) | Formula::Const(_) => 6,
        }
    }
}

/// Pretty-printer emitting the minimal parentheses needed to re-parse to the same tree.
pub struct DisplayFormula<'a> {
    formula: &'a Formula,
    universe: &'a VarUniverse,
}

impl DisplayFormula<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula, parens: bool) -> fmt::Result {
        if parens {
            f.write_str("(")?;
        }
        match node {
            Formula::Var(i) => f.write_str(self.universe.name(*i))?,
            Formula::Const(b) => f.write_str(if *b { "true" } else { "false" })?,
            Formula::Not(inner) => {
                f.write_str("!")?;
                self.write(f, inner, inner.precedence() < 5)?;
            }
            Formula::And(parts) | Formula::Or(parts) => {
                let sep = if matches!(node, Formula::And(_)) { " & " } else { " | " };
                for (k, part) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    self.write(f, part, part.precedence() <= node.precedence())?;
                }
            }
            Formula::Implies(a, b) => {
                self.write(f, a, a.precedence() <= 2)?;
                f.write_str(" -> ")?;
                self.write(f, b, b.precedence() < 2)?;
            }
            Formula::Iff(a, b) => {
                self.write(f, a, a.precedence() < 1)?;
                f.write_str(" <-> ")?;
                self.write(f, b, b.precedence() <= 1)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, false)
    }
}

/// A candidate's theory: an ordered list of statements over a universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    universe: VarUniverse,
    statements: Vec<Formula>,
}

impl Theory {
    pub fn new(universe: VarUniverse) -> Self {
        Self {
            universe,
            statements: Vec::new(),
        }
    }

    pub fn with_statements(universe: VarUniverse, statements: Vec<Formula>) -> Result<Self> {
        let mut theory = Self::new(universe);
        for s in statements {
            theory.push(s)?;
        }
        Ok(theory)
    }

    pub fn push(&mut self, statement: Formula) -> Result<()> {
        if let Some(&bad) = statement.free_variables().range(self.universe.len()..).next() {
            return Err(Error::UnknownVariable(format!("#{bad}")));
        }
        self.statements.push(statement);
        Ok(())
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn statements(&self) -> &[Formula] {
        &self.statements
    }

    pub fn num_vars(&self) -> usize {
        self.universe.len()
    }

    pub fn models(&self, world: &World) -> bool {
        self.statements.iter().all(|s| s.evaluate(world))
    }

    pub fn conjunction(&self) -> Formula {
        Formula::and_all(self.statements.clone())
    }

    /// Copy of this theory with one more statement.
    pub fn strengthened(&self, statement: Formula) -> Result<Self> {
        let mut out = self.clone();
        out.push(statement)?;
        Ok(out)
    }

    /// Theory text: one statement per line.
    pub fn to_text(&self) -> String {
        self.statements
            .iter()
            .map(|s| format!("{}\n", s.display(&self.universe)))
            .collect()
    }
}

/// Truth-table evaluation of a single formula.
pub fn evaluate(formula: &Formula, world: &World) -> bool {
    formula.evaluate(world)
}

/// True iff `world` satisfies every statement (vacuously for the empty theory).
pub fn models_theory(theory: &Theory, world: &World) -> bool {
    theory.models(world)
}

pub fn free_variables(formula: &Formula) -> BTreeSet<usize> {
    formula.free_variables()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token<'s> {
    Ident(&'s str),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Token<'_>, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let token = match c {
            b'!' => {
                pos += 1;
                Token::Not
            }
            b'&' => {
                pos += 1;
                Token::And
            }
            b'|' => {
                pos += 1;
                Token::Or
            }
            b'(' => {
                pos += 1;
                Token::LParen
            }
            b')' => {
                pos += 1;
                Token::RParen
            }
            b'-' if bytes.get(pos + 1) == Some(&b'>') => {
                pos += 2;
                Token::Implies
            }
            b'<' if text[pos..].starts_with("<->") => {
                pos += 3;
                Token::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                    pos += 1;
                }
                match &text[start..pos] {
                    "true" => Token::True,
                    "false" => Token::False,
                    ident => Token::Ident(ident),
                }
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap();
                return Err(Error::Parse {
                    position: pos,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((token, start));
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

enum Resolver<'u> {
    Fixed(&'u VarUniverse),
    Auto(&'u mut VarUniverse),
}

struct Parser<'s, 'u> {
    tokens: Vec<(Token<'s>, usize)>,
    cursor: usize,
    resolver: Resolver<'u>,
}

impl<'s, 'u> Parser<'s, 'u> {
    fn new(text: &'s str, resolver: Resolver<'u>) -> Result<Self> {
        Ok(Self {
            tokens: tokenize(text)?,
            cursor: 0,
            resolver,
        })
    }

    fn peek(&self) -> Token<'s> {
        self.tokens[self.cursor].0
    }

    fn position(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn bump(&mut self) -> Token<'s> {
        let t = self.peek();
        if t != Token::End {
            self.cursor += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.position(),
            message: message.into(),
        })
    }

    fn parse_all(mut self) -> Result<Formula> {
        let f = self.parse_iff()?;
        match self.peek() {
            Token::End => Ok(f),
            Token::RParen => self.error("unbalanced `)`"),
            _ => self.error("expected an operator or end of input"),
        }
    }

    fn parse_iff(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_imp()?;
        while self.peek() == Token::Iff {
            self.bump();
            let rhs = self.parse_imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_imp(&mut self) -> Result<Formula> {
        let lhs = self.parse_or()?;
        if self.peek() == Token::Implies {
            self.bump();
            let rhs = self.parse_imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.parse_and()?];
        while self.peek() == Token::Or {
            self.bump();
            parts.push(self.parse_and()?);
        }
        Ok(Formula::or_all(parts))
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.parse_not()?];
        while self.peek() == Token::And {
            self.bump();
            parts.push(self.parse_not()?);
        }
        Ok(Formula::and_all(parts))
    }

    fn parse_not(&mut self) -> Result<Formula> {
        if self.peek() == Token::Not {
            self.bump();
            return Ok(Formula::negate(self.parse_not()?));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Formula> {
        let position = self.position();
        match self.bump() {
            Token::True => Ok(Formula::Const(true)),
            Token::False => Ok(Formula::Const(false)),
            Token::Ident(name) => self.resolve(name, position).map(Formula::Var),
            Token::LParen => {
                let inner = self.parse_iff()?;
                if self.peek() != Token::RParen {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Token::End => Err(Error::Parse {
                position,
                message: "unexpected end of input".into(),
            }),
            _ => Err(Error::Parse {
                position,
                message: "expected a variable, constant, `!` or `(`".into(),
            }),
        }
    }

    fn resolve(&mut self, name: &str, position: usize) -> Result<usize> {
        match &mut self.resolver {
            Resolver::Fixed(u) => u.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string())),
            Resolver::Auto(u) => u.insert(name).map_err(|_| Error::Parse {
                position,
                message: format!("invalid identifier `{name}`"),
            }),
        }
    }
}
