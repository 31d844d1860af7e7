//! Command-line front end. [`run`] renders a command's full output as a
//! string so the binary stays a thin wrapper and tests can run in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::evaluation::utility;
use crate::formula::{Theory, VarUniverse};
use crate::io::{load_problem, read_formula_input, FormulaInput, VoterFile};
use crate::reductions::{
    cnfsat_to_pessimistic_turnout, count_via_expected_utility, sat_to_optimistic_threshold,
    unsat_to_pessimistic_threshold, wsat_to_evaluation, Cnf, CountGadget, WsatDirection, WsatInstance,
};
use crate::scalar::{format_rational, parse_rational};
use crate::strategy::{optimal_complete_theory, optimal_completion, turnout, TurnoutInstance};
use crate::voters::{Voter, VoterKind};
use crate::worlds::{count_models, Limits, World};
use crate::{Error, Rational};

#[derive(Debug, Parser)]
#[command(
    name = "campaign",
    version,
    about = "Exact voter utility, campaign strategy and reduction gadgets"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Largest universe that may be enumerated.
    #[arg(long, global = true, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..=63))]
    pub nmax: u32,
    /// Largest pessimistic population for mixed turnout.
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..=30))]
    pub pmax: u32,
    /// Print one key=value pair per line.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Worker threads for world scans (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Utility of a theory for each voter.
    Eval {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        voters: PathBuf,
        /// Only report this voter.
        #[arg(long)]
        voter: Option<String>,
    },
    /// Optimal complete theory for an expected-value or pessimistic population.
    Optimize {
        #[arg(long)]
        voters: PathBuf,
        #[arg(long)]
        kind: Option<KindArg>,
    },
    /// Optimal completion of an existing theory.
    Complete {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        voters: PathBuf,
        #[arg(long)]
        kind: Option<KindArg>,
    },
    /// Is there a theory meeting the thresholds of at least h voters?
    Turnout {
        #[arg(long)]
        voters: PathBuf,
        #[arg(long)]
        h: usize,
    },
    /// Emit the instance files of a reduction gadget.
    Reduce {
        gadget: Gadget,
        #[arg(long)]
        formula: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Weights for `wsat`, e.g. `x1=2,x2=1/2`.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, value_enum, default_value_t = DirectionArg::Max)]
        direction: DirectionArg,
    },
    /// Model count of a formula file (theory text or DIMACS).
    Count {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = Via::Enumerate)]
        via: Via,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Expected,
    Pessimistic,
}

impl From<KindArg> for VoterKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Expected => VoterKind::Expected,
            KindArg::Pessimistic => VoterKind::Pessimistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Gadget {
    /// SAT -> optimistic threshold.
    SatOptimistic,
    /// UNSAT -> pessimistic threshold.
    UnsatPessimistic,
    /// Weighted SAT -> optimistic (max) or pessimistic (min) evaluation.
    Wsat,
    /// #SAT -> two expected-value evaluations.
    Count,
    /// CNF-SAT -> pessimistic turnout.
    CnfTurnout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Enumerate,
    Utility,
    Both,
}

/// Failure of a CLI command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn q(value: &Rational) -> String {
    format_rational(value)
}

fn world_literals(world: &World, universe: &VarUniverse) -> String {
    (0..world.len())
        .map(|i| {
            let name = universe.name(i);
            if world.get(i) {
                name.to_string()
            } else {
                format!("!{name}")
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses arguments and runs the command, returning everything it prints.
pub fn run(cli: &Cli) -> CliResult<String> {
    let limits = Limits {
        n_max: cli.global.nmax as usize,
        p_max: cli.global.pmax as usize,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(&cli.command, &limits, cli.global.machine))
}

fn dispatch(command: &Command, limits: &Limits, machine: bool) -> CliResult<String> {
    match command {
        Command::Eval { theory, voters, voter } => cmd_eval(theory, voters, voter.as_deref(), limits, machine),
        Command::Optimize { voters, kind } => cmd_optimize(voters, *kind, machine),
        Command::Complete { theory, voters, kind } => cmd_complete(theory, voters, *kind, limits, machine),
        Command::Turnout { voters, h } => cmd_turnout(voters, *h, limits, machine),
        Command::Reduce {
            gadget,
            formula,
            out,
            weights,
            direction,
        } => cmd_reduce(*gadget, formula, out, weights.as_deref(), *direction, limits, machine),
        Command::Count { formula, via } => cmd_count(formula, *via, limits, machine),
    }
}

pub fn cmd_eval(
    theory_path: &Path,
    voters_path: &Path,
    only: Option<&str>,
    limits: &Limits,
    machine: bool,
) -> CliResult<String> {
    let problem = load_problem(Some(&read(theory_path)?), Some(&read(voters_path)?))?;
    let selected: Vec<&Voter<Rational>> = problem
        .voters
        .iter()
        .filter(|v| only.is_none_or(|id| v.id == id))
        .collect();
    if let Some(id) = only.filter(|_| selected.is_empty()) {
        return Err(CliError::Usage(format!("no voter with id `{id}`")));
    }
    let mut out = String::new();
    for v in selected {
        let r = utility(&problem.theory, v, limits)?;
        let witness = r.witness.map(|w| world_literals(&w, &problem.universe));
        if machine {
            writeln!(out, "voter={}", v.id).unwrap();
            writeln!(out, "kind={}", v.kind).unwrap();
            writeln!(out, "value={}", q(&r.value)).unwrap();
            if let Some(w) = &witness {
                writeln!(out, "witness={w}").unwrap();
            }
            if let Some(k) = &v.threshold {
                writeln!(out, "threshold={}", q(k)).unwrap();
                writeln!(out, "meets_threshold={}", r.value >= *k).unwrap();
            }
        } else {
            write!(out, "{} {} {}", v.id, v.kind, q(&r.value)).unwrap();
            if let Some(w) = &witness {
                write!(out, " [{w}]").unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn resolve_kind(voters: &[Voter<Rational>], kind: Option<KindArg>) -> CliResult<VoterKind> {
    if let Some(k) = kind {
        return Ok(k.into());
    }
    let first = voters.first().ok_or(Error::EmptyPopulation)?.kind;
    if voters.iter().any(|v| v.kind != first) {
        return Err(CliError::Usage("population mixes voter kinds; pass --kind".into()));
    }
    Ok(first)
}

pub fn cmd_optimize(voters_path: &Path, kind: Option<KindArg>, machine: bool) -> CliResult<String> {
    let problem = load_problem(None, Some(&read(voters_path)?))?;
    let kind = resolve_kind(&problem.voters, kind)?;
    let r = optimal_complete_theory(&problem.universe, &problem.voters, kind)?;
    let mut out = String::new();
    for s in r.theory.statements() {
        let lit = s.display(&problem.universe);
        if machine {
            writeln!(out, "literal={lit}").unwrap();
        } else {
            writeln!(out, "{lit}").unwrap();
        }
    }
    if machine {
        writeln!(out, "total={}", q(&r.total)).unwrap();
    } else {
        writeln!(out, "# total {}", q(&r.total)).unwrap();
    }
    Ok(out)
}

pub fn cmd_complete(
    theory_path: &Path,
    voters_path: &Path,
    kind: Option<KindArg>,
    limits: &Limits,
    machine: bool,
) -> CliResult<String> {
    let problem = load_problem(Some(&read(theory_path)?), Some(&read(voters_path)?))?;
    let kind = resolve_kind(&problem.voters, kind)?;
    let r = optimal_completion(&problem.theory, &problem.voters, kind, limits)?;
    let mut out = String::new();
    if machine {
        for s in r.theory.statements() {
            writeln!(out, "statement={}", s.display(&problem.universe)).unwrap();
        }
        writeln!(out, "world={}", world_literals(&r.world, &problem.universe)).unwrap();
        writeln!(out, "value={}", q(&r.total)).unwrap();
    } else {
        out.push_str(&r.theory.to_text());
        writeln!(out, "# value {}", q(&r.total)).unwrap();
    }
    Ok(out)
}

pub fn cmd_turnout(voters_path: &Path, h: usize, limits: &Limits, machine: bool) -> CliResult<String> {
    let problem = load_problem(None, Some(&read(voters_path)?))?;
    let inst = TurnoutInstance::new(problem.universe.clone(), problem.voters, h)?;
    let outcome = turnout(&inst, limits)?;
    let answer = if outcome.decision { "YES" } else { "NO" };
    let mut out = String::new();
    if machine {
        writeln!(out, "decision={answer}").unwrap();
        writeln!(out, "h={h}").unwrap();
        writeln!(out, "satisfied_count={}", outcome.satisfied_count()).unwrap();
        writeln!(out, "satisfied={}", outcome.satisfied.join(",")).unwrap();
        for s in outcome.witness.statements() {
            writeln!(out, "statement={}", s.display(&problem.universe)).unwrap();
        }
        if let Some(best) = &outcome.best_utilities {
            for (v, b) in inst.voters().iter().zip(best) {
                writeln!(out, "best.{}={}", v.id, q(b)).unwrap();
            }
        }
    } else {
        writeln!(out, "{answer}").unwrap();
        writeln!(
            out,
            "# satisfied {} of {} (h = {h}): {}",
            outcome.satisfied_count(),
            inst.voters().len(),
            outcome.satisfied.join(" ")
        )
        .unwrap();
        if let Some(best) = &outcome.best_utilities {
            for (v, b) in inst.voters().iter().zip(best) {
                writeln!(out, "# best {} {}", v.id, q(b)).unwrap();
            }
        }
        out.push_str(&outcome.witness.to_text());
    }
    Ok(out)
}

fn parse_weights(spec: &str, universe: &VarUniverse) -> CliResult<Vec<Rational>> {
    let mut weights: Vec<Option<Rational>> = vec![None; universe.len()];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("weight `{item}` is not name=value")))?;
        let i = universe
            .index_of(name.trim())
            .ok_or_else(|| Error::UnknownVariable(name.trim().to_string()))?;
        weights[i] = Some(parse_rational(value)?);
    }
    weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or_else(|| CliError::Usage(format!("missing weight for `{}`", universe.name(i)))))
        .collect()
}

struct Emitted {
    out: String,
    machine: bool,
}

impl Emitted {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        if self.machine {
            writeln!(self.out, "{key}={value}").unwrap();
        } else {
            writeln!(self.out, "{key}: {value}").unwrap();
        }
    }
}

fn write_theory_file(dir: &Path, name: &str, theory: &Theory, emitted: &mut Emitted) -> CliResult<()> {
    let path = dir.join(name);
    write(&path, &theory.to_text())?;
    emitted.kv("file", path.display());
    Ok(())
}

fn write_voter_file(
    dir: &Path,
    universe: &VarUniverse,
    voters: &[Voter<Rational>],
    emitted: &mut Emitted,
) -> CliResult<()> {
    let path = dir.join("voters.json");
    write(&path, &VoterFile::from_voters(universe, voters).to_json())?;
    emitted.kv("file", path.display());
    Ok(())
}

fn require_cnf(input: &FormulaInput) -> CliResult<Cnf> {
    match &input.cnf {
        Some(cnf) => Ok(cnf.clone()),
        None => Err(Cnf::from_formula(&input.formula)
            .err()
            .map_or_else(|| CliError::Usage("formula is not clausal".into()), CliError::Core)),
    }
}

pub fn cmd_reduce(
    gadget: Gadget,
    formula_path: &Path,
    out_dir: &Path,
    weights: Option<&str>,
    direction: DirectionArg,
    limits: &Limits,
    machine: bool,
) -> CliResult<String> {
    let input = read_formula_input(&read(formula_path)?)?;
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut emitted = Emitted {
        out: String::new(),
        machine,
    };
    emitted.kv("gadget", gadget.to_possible_value().expect("named gadget").get_name());
    match gadget {
        Gadget::SatOptimistic | Gadget::UnsatPessimistic => {
            let inst = if gadget == Gadget::SatOptimistic {
                sat_to_optimistic_threshold::<Rational>(&input.universe, &input.formula)?
            } else {
                unsat_to_pessimistic_threshold::<Rational>(&input.universe, &input.formula)?
            };
            let universe = inst.theory.universe().clone();
            write_theory_file(out_dir, "theory.txt", &inst.theory, &mut emitted)?;
            write_voter_file(out_dir, &universe, std::slice::from_ref(&inst.voter), &mut emitted)?;
            emitted.kv("threshold", q(inst.voter.threshold.as_ref().unwrap()));
            let source = if gadget == Gadget::SatOptimistic {
                "satisfiable"
            } else {
                "unsatisfiable"
            };
            emitted.kv(
                "inverse",
                format!("the formula is {source} iff `campaign eval` reports a value >= the threshold"),
            );
        }
        Gadget::Wsat => {
            let spec = weights.ok_or_else(|| CliError::Usage("wsat needs --weights".into()))?;
            let dir = match direction {
                DirectionArg::Max => WsatDirection::Max,
                DirectionArg::Min => WsatDirection::Min,
            };
            let wsat = WsatInstance::new(
                input.universe.clone(),
                input.formula.clone(),
                parse_weights(spec, &input.universe)?,
                dir,
            )?;
            let inst = wsat_to_evaluation(&wsat, limits)?;
            write_theory_file(out_dir, "theory.txt", &inst.theory, &mut emitted)?;
            write_voter_file(
                out_dir,
                &input.universe,
                std::slice::from_ref(&inst.voter),
                &mut emitted,
            )?;
            emitted.kv("inverse", inst.inverse.recipe(format_rational));
        }
        Gadget::Count => {
            let gadget = CountGadget::build(&input.universe, &input.formula)?;
            let universe = gadget.psi.universe().clone();
            write_theory_file(out_dir, "psi.txt", &gadget.psi, &mut emitted)?;
            write_theory_file(out_dir, "psi_prime.txt", &gadget.psi_prime, &mut emitted)?;
            write_voter_file(out_dir, &universe, std::slice::from_ref(&gadget.voter), &mut emitted)?;
            emitted.kv(
                "inverse",
                "count = 1 / (ut(psi) / ut(psi_prime) - 1); count = 0 when ut(psi_prime) = 0",
            );
        }
        Gadget::CnfTurnout => {
            let cnf = require_cnf(&input)?;
            let inst = cnfsat_to_pessimistic_turnout::<Rational>(&input.universe, &cnf)?;
            write_voter_file(out_dir, &input.universe, inst.voters(), &mut emitted)?;
            emitted.kv("h", inst.h());
            emitted.kv(
                "inverse",
                format!(
                    "the formula is satisfiable iff `campaign turnout --h {}` answers YES",
                    inst.h()
                ),
            );
        }
    }
    Ok(emitted.out)
}

pub fn cmd_count(formula_path: &Path, via: Via, limits: &Limits, machine: bool) -> CliResult<String> {
    let input = read_formula_input(&read(formula_path)?)?;
    let theory = Theory::with_statements(input.universe.clone(), vec![input.formula.clone()])?;
    let enumerated = match via {
        Via::Enumerate | Via::Both => Some(count_models(&theory, limits)?.total),
        Via::Utility => None,
    };
    let report = match via {
        Via::Utility | Via::Both => Some(count_via_expected_utility::<BigRational>(
            &input.universe,
            &input.formula,
            limits,
        )?),
        Via::Enumerate => None,
    };
    if let (Some(a), Some(r)) = (enumerated, &report) {
        if a != r.count {
            return Err(CliError::Usage(format!(
                "enumeration counted {a} models but the utility gadget gave {}",
                r.count
            )));
        }
    }
    let count = enumerated.or(report.as_ref().map(|r| r.count)).unwrap();
    let mut out = String::new();
    if machine {
        writeln!(out, "count={count}").unwrap();
        if let Some(r) = &report {
            if let Some(u) = &r.utility_psi {
                writeln!(out, "ut_psi={}", q(u)).unwrap();
            }
            writeln!(out, "ut_psi_prime={}", q(&r.utility_psi_prime)).unwrap();
        }
    } else {
        writeln!(out, "{count}").unwrap();
    }
    Ok(out)
}
