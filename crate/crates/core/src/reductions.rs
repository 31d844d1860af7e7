//! Generators for the hardness gadgets: each turns a source problem (SAT,
//! UNSAT, weighted SAT, #SAT, CNF-SAT) into a utility or turnout instance and
//! carries the mapping that reads the source answer back out.
//!
//! Fresh variables are always appended after the source variables, so a
//! source world is a prefix of every target world.

use crate::error::{Error, Result};
use crate::evaluation::{meets_threshold, utility, utility_expected, ExpectedMethod};
use crate::formula::{Formula, Theory, VarUniverse};
use crate::scalar::Scalar;
use crate::strategy::TurnoutInstance;
use crate::voters::{Voter, VoterKind};
use crate::worlds::{is_satisfiable, Limits, World};

/// How to read the source answer from the target instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Inverse<S> {
    /// The source answer is YES iff `ut_v(T) >= k` equals `answer_when_met`.
    Decision { answer_when_met: bool },
    /// Optimal source weight `W = (u * max_weight + weight_sum) / 2` from the
    /// extremal utility `u`.
    Weight { max_weight: S, weight_sum: S },
}

impl<S: Scalar> Inverse<S> {
    /// Human-readable recipe, used when instances are written to disk.
    pub fn recipe(&self, format: impl Fn(&S) -> String) -> String {
        match self {
            Inverse::Decision { answer_when_met: true } => {
                "source is YES iff the voter's utility meets its threshold".into()
            }
            Inverse::Decision { answer_when_met: false } => {
                "source is YES iff the voter's utility does NOT meet its threshold".into()
            }
            Inverse::Weight { max_weight, weight_sum } => format!(
                "optimal weight W = (u * {} + {}) / 2 where u is the voter's utility; the witness world is the optimal assignment",
                format(max_weight),
                format(weight_sum)
            ),
        }
    }

    pub fn weight_from_utility(&self, u: &S) -> Option<S> {
        match self {
            Inverse::Weight { max_weight, weight_sum } => {
                let two = S::one() + S::one();
                Some((u.clone() * max_weight.clone() + weight_sum.clone()) / two)
            }
            Inverse::Decision { .. } => None,
        }
    }
}

/// Answer to the source problem recovered through a gadget.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceAnswer<S> {
    Decision(bool),
    /// Optimal total weight and an assignment achieving it.
    Weight {
        weight: S,
        assignment: World,
    },
}

/// A single-voter utility instance built from a source problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionInstance<S> {
    pub theory: Theory,
    /// Carries the threshold `k` for decision gadgets.
    pub voter: Voter<S>,
    pub inverse: Inverse<S>,
}

impl<S: Scalar> ReductionInstance<S> {
    /// Solves the target instance exactly and maps the result back.
    pub fn source_answer(&self, limits: &Limits) -> Result<SourceAnswer<S>> {
        match &self.inverse {
            Inverse::Decision { answer_when_met } => {
                let met = meets_threshold(&self.theory, &self.voter, None, limits)?;
                Ok(SourceAnswer::Decision(met == *answer_when_met))
            }
            inverse @ Inverse::Weight { .. } => {
                let r = utility(&self.theory, &self.voter, limits)?;
                let weight = inverse.weight_from_utility(&r.value).expect("weight inverse");
                Ok(SourceAnswer::Weight {
                    weight,
                    assignment: r.witness.expect("extremal semantics carry a witness"),
                })
            }
        }
    }
}

/// Universe extended with a fresh `x_star`, and the star gadget `x_star -> phi`.
fn star_gadget<S: Scalar>(
    universe: &VarUniverse,
    phi: &Formula,
    kind: VoterKind,
    star_pref: S,
) -> Result<(Theory, Voter<S>)> {
    let mut extended = universe.clone();
    let star = extended.add_fresh("x_star");
    let theory = Theory::with_statements(extended, vec![Formula::implies(Formula::Var(star), phi.clone())])?;
    let mut prefs = vec![S::zero(); star + 1];
    prefs[star] = star_pref;
    let voter = Voter::new("v", kind, prefs)?.with_threshold(S::one());
    Ok((theory, voter))
}

/// SAT to optimistic threshold: `T = {x_star -> phi}`, `p(x_star) = 1`, `k = 1`.
/// The threshold is met iff `phi` is satisfiable.
pub fn sat_to_optimistic_threshold<S: Scalar>(universe: &VarUniverse, phi: &Formula) -> Result<ReductionInstance<S>> {
    let (theory, voter) = star_gadget(universe, phi, VoterKind::Optimistic, S::one())?;
    Ok(ReductionInstance {
        theory,
        voter,
        inverse: Inverse::Decision { answer_when_met: true },
    })
}

/// UNSAT to pessimistic threshold: as above with `p(x_star) = -1`. The
/// threshold is met iff `phi` is unsatisfiable.
pub fn unsat_to_pessimistic_threshold<S: Scalar>(
    universe: &VarUniverse,
    phi: &Formula,
) -> Result<ReductionInstance<S>> {
    let (theory, voter) = star_gadget(universe, phi, VoterKind::Pessimistic, -S::one())?;
    Ok(ReductionInstance {
        theory,
        voter,
        inverse: Inverse::Decision { answer_when_met: true },
    })
}

/// Whether weighted SAT maximises or minimises the weight of true variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsatDirection {
    Max,
    Min,
}

/// Weighted satisfiability: a formula plus a positive weight per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct WsatInstance<S> {
    pub universe: VarUniverse,
    pub formula: Formula,
    weights: Vec<S>,
    pub direction: WsatDirection,
}

impl<S: Scalar> WsatInstance<S> {
    pub fn new(universe: VarUniverse, formula: Formula, weights: Vec<S>, direction: WsatDirection) -> Result<Self> {
        if weights.len() != universe.len() {
            return Err(Error::UniverseMismatch {
                expected: universe.len(),
                found: weights.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidInstance(format!(
                "weight of `{}` must be positive",
                universe.name(i)
            )));
        }
        Ok(Self {
            universe,
            formula,
            weights,
            direction,
        })
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `R`, the largest weight (zero for an empty universe).
    pub fn max_weight(&self) -> S {
        self.weights
            .iter()
            .fold(S::zero(), |acc, w| if *w > acc { w.clone() } else { acc })
    }

    pub fn weight_sum(&self) -> S {
        self.weights.iter().fold(S::zero(), |mut acc, w| {
            acc += w;
            acc
        })
    }

    /// Total weight of the variables `world` sets true.
    pub fn weight_of(&self, world: &World) -> S {
        let mut total = S::zero();
        for (i, w) in self.weights.iter().enumerate() {
            if world.get(i) {
                total += w;
            }
        }
        total
    }
}

/// Weighted SAT to utility evaluation: `T = {phi}`, `p(x_i) = r_i / R`, an
/// optimistic voter for MAX and a pessimistic one for MIN. The utility range
/// `[-sum r/R, sum r/R]` maps affinely onto `[0, sum r]`.
pub fn wsat_to_evaluation<S: Scalar>(inst: &WsatInstance<S>, limits: &Limits) -> Result<ReductionInstance<S>> {
    let theory = Theory::with_statements(inst.universe.clone(), vec![inst.formula.clone()])?;
    if !is_satisfiable(&theory, limits)? {
        return Err(Error::UnsatisfiableSource);
    }
    let max_weight = inst.max_weight();
    let prefs = inst.weights.iter().map(|w| w.clone() / max_weight.clone()).collect();
    let kind = match inst.direction {
        WsatDirection::Max => VoterKind::Optimistic,
        WsatDirection::Min => VoterKind::Pessimistic,
    };
    Ok(ReductionInstance {
        theory,
        voter: Voter::new("v", kind, prefs)?,
        inverse: Inverse::Weight {
            max_weight,
            weight_sum: inst.weight_sum(),
        },
    })
}

/// The #SAT gadget: `psi = phi & y & z` and
/// `psi' = psi | (y & !z & x_1 & ... & x_n)`, with voter `D` caring only
/// about `y` and `z`. Every `psi` model scores 2 for `D`; the one extra model
/// of `psi'` scores 0, so `ut(psi) / ut(psi') = (S + 1) / S`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountGadget<S> {
    pub psi: Theory,
    pub psi_prime: Theory,
    pub voter: Voter<S>,
    pub y: usize,
    pub z: usize,
    pub source_vars: usize,
}

impl<S: Scalar> CountGadget<S> {
    pub fn build(universe: &VarUniverse, phi: &Formula) -> Result<Self> {
        let n = universe.len();
        let mut extended = universe.clone();
        let y = extended.add_fresh("y");
        let z = extended.add_fresh("z");
        let psi = Formula::And(vec![phi.clone(), Formula::Var(y), Formula::Var(z)]);
        let mut extra = vec![Formula::Var(y), Formula::negate(Formula::Var(z))];
        extra.extend((0..n).map(Formula::Var));
        let psi_prime = Formula::Or(vec![psi.clone(), Formula::And(extra)]);
        let mut prefs = vec![S::zero(); n + 2];
        prefs[y] = S::one();
        prefs[z] = S::one();
        Ok(Self {
            psi: Theory::with_statements(extended.clone(), vec![psi])?,
            psi_prime: Theory::with_statements(extended, vec![psi_prime])?,
            voter: Voter::new("D", VoterKind::Expected, prefs)?,
            y,
            z,
            source_vars: n,
        })
    }

    /// The model of `psi'` that is not a model of `psi`.
    pub fn extra_world(&self) -> World {
        let n = self.source_vars;
        let mut values = vec![true; n + 2];
        values[self.z] = false;
        World::from_bools(&values)
    }
}

/// Model count recovered through expected-value utility.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport<S> {
    pub count: u64,
    pub utility_psi: Option<S>,
    pub utility_psi_prime: S,
    /// `ut(psi) / ut(psi')`, present when `phi` is satisfiable.
    pub ratio: Option<S>,
    /// Number of expected-utility evaluations performed.
    pub oracle_calls: usize,
}

/// `#SAT(phi) = 1 / (ut_D(psi) / ut_D(psi') - 1)` using two expected-value
/// evaluations. An unsatisfiable `phi` leaves `psi'` with a single model of
/// utility 0, which is detected before dividing and reported as 0.
pub fn count_via_expected_utility<S: Scalar>(
    universe: &VarUniverse,
    phi: &Formula,
    limits: &Limits,
) -> Result<CountReport<S>> {
    let gadget = CountGadget::<S>::build(universe, phi)?;
    limits.check_vars(gadget.psi.num_vars())?;
    let method = ExpectedMethod::Enumerate;
    let prime = utility_expected(&gadget.psi_prime, &gadget.voter, method, limits)?.value;
    if prime.is_zero() {
        return Ok(CountReport {
            count: 0,
            utility_psi: None,
            utility_psi_prime: prime,
            ratio: None,
            oracle_calls: 1,
        });
    }
    let psi = utility_expected(&gadget.psi, &gadget.voter, method, limits)?.value;
    let ratio = psi.clone() / prime.clone();
    let count_value = S::one() / (ratio.clone() - S::one());
    let count = count_value
        .to_u64()
        .filter(|c| S::from_count(*c) == count_value)
        .ok_or_else(|| Error::InvalidInstance(format!("non-integral model count {count_value:?}")))?;
    Ok(CountReport {
        count,
        utility_psi: Some(psi),
        utility_psi_prime: prime,
        ratio: Some(ratio),
        oracle_calls: 2,
    })
}

/// A literal of a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

/// Formula in clausal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    /// Reads a conjunction of disjunctions of literals. `true` contributes no
    /// clause and `false` is the empty clause.
    pub fn from_formula(formula: &Formula) -> Result<Self> {
        let parts: Vec<&Formula> = match formula {
            Formula::And(parts) => parts.iter().collect(),
            Formula::Const(true) => Vec::new(),
            other => vec![other],
        };
        let mut clauses = Vec::new();
        for part in parts {
            match part {
                Formula::Const(true) => {}
                Formula::Const(false) => clauses.push(Vec::new()),
                Formula::Or(lits) => clauses.push(lits.iter().map(as_literal).collect::<Result<_>>()?),
                single => clauses.push(vec![as_literal(single)?]),
            }
        }
        let cnf = Cnf { clauses };
        cnf.check_duplicates()?;
        Ok(cnf)
    }

    pub fn check_duplicates(&self) -> Result<()> {
        for (c, clause) in self.clauses.iter().enumerate() {
            for (k, lit) in clause.iter().enumerate() {
                if clause[..k].contains(lit) {
                    return Err(Error::NotCnf(format!("clause {} repeats a literal", c + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and_all(
            self.clauses
                .iter()
                .map(|c| Formula::or_all(c.iter().map(|l| Formula::literal(l.var, l.positive)).collect()))
                .collect(),
        )
    }

    pub fn satisfied_by(&self, world: &World) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| world.get(l.var) == l.positive))
    }
}

fn as_literal(f: &Formula) -> Result<Literal> {
    match f {
        Formula::Var(v) => Ok(Literal {
            var: *v,
            positive: true,
        }),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Var(v) => Ok(Literal {
                var: *v,
                positive: false,
            }),
            _ => Err(Error::NotCnf("negation of a non-variable".into())),
        },
        _ => Err(Error::NotCnf("expected a literal inside a clause".into())),
    }
}

/// CNF-SAT to pessimistic turnout: clause `i` with `r` literals becomes voter
/// `c<i>` with `p = +-1/r` on its literals and `k = -(r-1)/r`, which accepts
/// exactly the worlds satisfying the clause; `h` is the number of clauses.
///
/// A clause holding both `x` and `!x` gets `p(x) = 0` and its voter accepts
/// every world. An empty clause becomes an all-zero voter with `k = 1`,
/// which no world satisfies, so the instance is a NO instance.
pub fn cnfsat_to_pessimistic_turnout<S: Scalar>(universe: &VarUniverse, cnf: &Cnf) -> Result<TurnoutInstance<S>> {
    cnf.check_duplicates()?;
    let n = universe.len();
    let mut voters = Vec::with_capacity(cnf.clauses.len());
    for (c, clause) in cnf.clauses.iter().enumerate() {
        let id = format!("c{}", c + 1);
        let mut prefs = vec![S::zero(); n];
        let voter = if clause.is_empty() {
            Voter::new(id, VoterKind::Pessimistic, prefs)?.with_threshold(S::one())
        } else {
            let r = S::from_count(clause.len() as u64);
            let share = S::one() / r.clone();
            for lit in clause {
                if lit.var >= n {
                    return Err(Error::UnknownVariable(format!("#{}", lit.var + 1)));
                }
                if lit.positive {
                    prefs[lit.var] += &share;
                } else {
                    prefs[lit.var] -= &share;
                }
            }
            let k = -((r.clone() - S::one()) / r);
            Voter::new(id, VoterKind::Pessimistic, prefs)?.with_threshold(k)
        };
        voters.push(voter);
    }
    let h = voters.len();
    TurnoutInstance::new(universe.clone(), voters, h)
}
