//! File formats: theory text, voter JSON and DIMACS CNF.
//!
//! Theory file: UTF-8, one formula per line; blank lines and lines whose
//! first non-blank character is `#` are ignored.
//!
//! Voter file (JSON, unknown keys rejected):
//!
//! ```json
//! { "variables": ["x1", "x2"],
//!   "voters": [ { "id": "v1", "kind": "optimistic",
//!                 "prefs": { "x1": "1/2", "x2": "-1" },
//!                 "threshold": "-1/2" } ] }
//! ```
//!
//! `variables` and `threshold` are optional, and missing preferences read as
//! 0. Rationals are strings of the form `a/b` or a signed integer.
//! Without `variables`, the universe is the theory's variables in order of
//! first appearance followed by any further preference keys in file order.

use indexmap::IndexMap;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, VarUniverse};
use crate::reductions::{Cnf, Literal};
use crate::scalar::{format_rational, parse_rational};
use crate::voters::{Voter, VoterKind};

/// Statement lines of a theory file, paired with their 1-based line numbers.
fn statement_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn with_line(err: Error, line: usize) -> Error {
    match err {
        Error::Parse { position, message } => Error::Parse {
            position,
            message: format!("line {line}: {message}"),
        },
        other => other,
    }
}

/// Parses theory text against a fixed universe.
pub fn parse_theory(text: &str, universe: &VarUniverse) -> Result<Theory> {
    let mut statements = Vec::new();
    for (line, src) in statement_lines(text) {
        statements.push(Formula::parse(src, universe).map_err(|e| with_line(e, line))?);
    }
    Theory::with_statements(universe.clone(), statements)
}

/// Parses theory text, appending new variables to `universe`.
pub fn parse_theory_extending(text: &str, universe: &mut VarUniverse) -> Result<Vec<Formula>> {
    statement_lines(text)
        .map(|(line, src)| Formula::parse_extending(src, universe).map_err(|e| with_line(e, line)))
        .collect()
}

/// Serialized shape of a voter file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    pub voters: Vec<VoterEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterEntry {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub prefs: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
}

impl VoterFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::VoterFile(e.to_string()))
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("voter file serializes");
        out.push('\n');
        out
    }

    /// Describes `voters` over `universe`, listing every variable and only
    /// the nonzero preferences.
    pub fn from_voters(universe: &VarUniverse, voters: &[Voter<BigRational>]) -> Self {
        let voters = voters
            .iter()
            .map(|v| VoterEntry {
                id: v.id.clone(),
                kind: v.kind.to_string(),
                prefs: v
                    .prefs()
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(i, p)| (universe.name(i).to_string(), format_rational(p)))
                    .collect(),
                threshold: v.threshold.as_ref().map(format_rational),
            })
            .collect();
        Self {
            variables: Some(universe.names().to_vec()),
            voters,
        }
    }
}

/// A theory and a voter population sharing one universe.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub universe: VarUniverse,
    pub theory: Theory,
    pub voters: Vec<Voter<BigRational>>,
}

/// Resolves the universe of a theory text and a voter file and builds both.
/// Either input may be absent (an absent theory is the empty theory).
pub fn load_problem(theory_text: Option<&str>, voter_text: Option<&str>) -> Result<Problem> {
    let file = voter_text.map(VoterFile::parse).transpose()?;
    let declared = file.as_ref().and_then(|f| f.variables.clone());
    let (universe, theory) = match declared {
        Some(names) => {
            let universe = VarUniverse::new(names)?;
            let theory = parse_theory(theory_text.unwrap_or(""), &universe)?;
            (universe, theory)
        }
        None => {
            let mut universe = VarUniverse::default();
            let statements = parse_theory_extending(theory_text.unwrap_or(""), &mut universe)?;
            for entry in file.iter().flat_map(|f| &f.voters) {
                for name in entry.prefs.keys() {
                    universe.insert(name.clone())?;
                }
            }
            let theory = Theory::with_statements(universe.clone(), statements)?;
            (universe, theory)
        }
    };
    let voters = match &file {
        Some(f) => build_voters(f, &universe)?,
        None => Vec::new(),
    };
    Ok(Problem {
        universe,
        theory,
        voters,
    })
}

fn build_voters(file: &VoterFile, universe: &VarUniverse) -> Result<Vec<Voter<BigRational>>> {
    let mut out: Vec<Voter<BigRational>> = Vec::with_capacity(file.voters.len());
    for entry in &file.voters {
        if out.iter().any(|v| v.id == entry.id) {
            return Err(Error::VoterFile(format!("duplicate voter id `{}`", entry.id)));
        }
        let kind: VoterKind = entry.kind.parse()?;
        let mut prefs = vec![BigRational::zero(); universe.len()];
        for (name, value) in &entry.prefs {
            let i = universe
                .index_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            let p = parse_rational(value).map_err(|_| Error::InvalidPreference {
                voter: entry.id.clone(),
                variable: name.clone(),
                reason: format!("`{value}` is not `a/b` or an integer"),
            })?;
            if p > BigRational::from_integer(1.into()) || p < BigRational::from_integer((-1).into()) {
                return Err(Error::InvalidPreference {
                    voter: entry.id.clone(),
                    variable: name.clone(),
                    reason: "outside [-1, 1]".into(),
                });
            }
            prefs[i] = p;
        }
        let mut voter = Voter::new(entry.id.clone(), kind, prefs)?;
        if let Some(k) = &entry.threshold {
            voter = voter.with_threshold(parse_rational(k)?);
        }
        out.push(voter);
    }
    Ok(out)
}

fn is_dimacs_comment(line: &str) -> bool {
    line == "c" || line.starts_with("c ") || line.starts_with("c\t")
}

/// True when the first meaningful line is a `p cnf` header.
pub fn looks_like_dimacs(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !is_dimacs_comment(l))
        .is_some_and(|l| l.starts_with("p cnf") || l.starts_with("p\tcnf"))
}

/// Parses DIMACS CNF. Variables are named `x1 .. xn`.
pub fn parse_dimacs(text: &str) -> Result<(VarUniverse, Cnf)> {
    let err = |line: usize, message: String| Error::Parse {
        position: line,
        message: format!("line {line}: {message}"),
    };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || is_dimacs_comment(line) {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate problem line".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["p", "cnf", n, m] => {
                    let n = n
                        .parse()
                        .map_err(|_| err(line_no, format!("bad variable count `{n}`")))?;
                    let m = m.parse().map_err(|_| err(line_no, format!("bad clause count `{m}`")))?;
                    header = Some((n, m));
                }
                _ => return Err(err(line_no, "expected `p cnf <vars> <clauses>`".into())),
            }
            continue;
        }
        let (n, _) = header.ok_or_else(|| err(line_no, "clause before `p cnf` header".into()))?;
        for token in line.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| err(line_no, format!("bad literal `{token}`")))?;
            if value == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = value.unsigned_abs() as usize;
            if var > n {
                return Err(err(line_no, format!("variable {var} exceeds declared {n}")));
            }
            current.push(Literal {
                var: var - 1,
                positive: value > 0,
            });
        }
    }
    let (n, m) = header.ok_or_else(|| err(0, "missing `p cnf` header".into()))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(err(0, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    let cnf = Cnf { clauses };
    cnf.check_duplicates()?;
    let universe = VarUniverse::new((1..=n).map(|i| format!("x{i}")))?;
    Ok((universe, cnf))
}

/// Writes `cnf` in DIMACS format over `n` variables.
pub fn write_dimacs(cnf: &Cnf, n: usize) -> String {
    let mut out = format!("p cnf {n} {}\n", cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            let v = lit.var as i64 + 1;
            out.push_str(&format!("{} ", if lit.positive { v } else { -v }));
        }
        out.push_str("0\n");
    }
    out
}

/// A formula read from a formula file: theory text (statements conjoined) or DIMACS.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaInput {
    pub universe: VarUniverse,
    pub formula: Formula,
    /// Present when the input was DIMACS or the formula is already clausal.
    pub cnf: Option<Cnf>,
}

pub fn read_formula_input(text: &str) -> Result<FormulaInput> {
    if looks_like_dimacs(text) {
        let (universe, cnf) = parse_dimacs(text)?;
        return Ok(FormulaInput {
            universe,
            formula: cnf.to_formula(),
            cnf: Some(cnf),
        });
    }
    let mut universe = VarUniverse::default();
    let statements = parse_theory_extending(text, &mut universe)?;
    let formula = Formula::and_all(statements);
    let cnf = Cnf::from_formula(&formula).ok();
    Ok(FormulaInput { universe, formula, cnf })
}
