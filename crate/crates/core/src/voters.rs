//! Voters: preference functions, per-world utility and population aggregation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::worlds::World;

/// How a voter turns the set of modeled worlds into a single utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VoterKind {
    /// Best modeled world.
    Optimistic,
    /// Worst modeled world.
    Pessimistic,
    /// Uniform average over modeled worlds.
    Expected,
}

impl VoterKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VoterKind::Optimistic => "optimistic",
            VoterKind::Pessimistic => "pessimistic",
            VoterKind::Expected => "expected",
        }
    }
}

impl fmt::Display for VoterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VoterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimistic" => Ok(VoterKind::Optimistic),
            "pessimistic" => Ok(VoterKind::Pessimistic),
            "expected" => Ok(VoterKind::Expected),
            other => Err(Error::VoterFile(format!("unknown voter kind `{other}`"))),
        }
    }
}

/// A voter with a dense preference vector aligned to the universe order.
///
/// Each preference lies in `[-1, 1]`: the sign is the preferred truth value,
/// the magnitude how much the voter cares, and `0` is indifference.
#[derive(Debug, Clone, PartialEq)]
pub struct Voter<S> {
    pub id: String,
    pub kind: VoterKind,
    prefs: Vec<S>,
    pub threshold: Option<S>,
}

impl<S: Scalar> Voter<S> {
    pub fn new(id: impl Into<String>, kind: VoterKind, prefs: Vec<S>) -> Result<Self> {
        let id = id.into();
        let one = S::one();
        let minus_one = -S::one();
        for (i, p) in prefs.iter().enumerate() {
            if *p < minus_one || *p > one {
                return Err(Error::InvalidPreference {
                    voter: id,
                    variable: format!("#{i}"),
                    reason: "outside [-1, 1]".into(),
                });
            }
        }
        Ok(Self {
            id,
            kind,
            prefs,
            threshold: None,
        })
    }

    pub fn with_threshold(mut self, threshold: S) -> Self {
        self.threshold = Some(threshold);
        self
    }

    pub fn prefs(&self) -> &[S] {
        &self.prefs
    }

    pub fn pref(&self, var: usize) -> &S {
        &self.prefs[var]
    }

    pub fn num_vars(&self) -> usize {
        self.prefs.len()
    }

    pub fn world_utility(&self, world: &World) -> S {
        world_utility(self, world)
    }

    pub fn best_possible_utility(&self) -> S {
        best_possible_utility(self)
    }

    /// Same voter with every preference negated (threshold untouched).
    pub fn negated(&self) -> Self {
        Self {
            prefs: self.prefs.iter().map(|p| -p.clone()).collect(),
            ..self.clone()
        }
    }

    /// Multiplies preferences and threshold by `factor`.
    pub fn scaled(&self, factor: &S) -> Result<Self> {
        let prefs = self.prefs.iter().map(|p| p.clone() * factor.clone()).collect();
        let mut out = Voter::new(self.id.clone(), self.kind, prefs)?;
        out.threshold = self.threshold.clone().map(|k| k * factor.clone());
        Ok(out)
    }

    pub fn threshold_or_err(&self) -> Result<&S> {
        self.threshold
            .as_ref()
            .ok_or_else(|| Error::MissingThreshold(self.id.clone()))
    }
}

/// `u_v(w) = sum_i p_v(x_i) * w(x_i)` with `w(x_i)` in `{-1, +1}`.
pub fn world_utility<S: Scalar>(voter: &Voter<S>, world: &World) -> S {
    debug_assert_eq!(voter.num_vars(), world.len());
    let mut total = S::zero();
    for (i, p) in voter.prefs.iter().enumerate() {
        if world.get(i) {
            total += p;
        } else {
            total -= p;
        }
    }
    total
}

/// `sum_i |p_v(x_i)|`, the utility of the voter's favourite world.
pub fn best_possible_utility<S: Scalar>(voter: &Voter<S>) -> S {
    voter.prefs.iter().fold(S::zero(), |mut acc, p| {
        acc += p.abs();
        acc
    })
}

/// The voter's favourite world: `sign(p)` per variable, indifference -> false.
pub fn favourite_world<S: Scalar>(voter: &Voter<S>) -> World {
    let values: Vec<bool> = voter.prefs.iter().map(|p| p.is_positive()).collect();
    World::from_bools(&values)
}

/// Per-variable mean preference of a population.
///
/// The result is a single voter (id `aggregate`, kind of the first voter,
/// no threshold) whose utility on any world, multiplied by the population
/// size, equals the population's total utility on that world.
pub fn aggregate_preferences<S: Scalar>(voters: &[Voter<S>]) -> Result<Voter<S>> {
    aggregate_counted(voters, &mut 0)
}

/// [`aggregate_preferences`], adding the number of scalar operations to `ops`.
pub(crate) fn aggregate_counted<S: Scalar>(voters: &[Voter<S>], ops: &mut u64) -> Result<Voter<S>> {
    let first = voters.first().ok_or(Error::EmptyPopulation)?;
    check_population(voters, first.num_vars())?;
    let m = S::from_count(voters.len() as u64);
    let prefs = (0..first.num_vars())
        .map(|i| {
            let mut sum = S::zero();
            for v in voters {
                sum += &v.prefs[i];
                *ops += 1;
            }
            *ops += 1;
            sum / m.clone()
        })
        .collect();
    Voter::new("aggregate", first.kind, prefs)
}

/// Every voter has a preference vector of length `n`.
pub fn check_population<S: Scalar>(voters: &[Voter<S>], n: usize) -> Result<()> {
    match voters.iter().find(|v| v.num_vars() != n) {
        Some(v) => Err(Error::UniverseMismatch {
            expected: n,
            found: v.num_vars(),
        }),
        None => Ok(()),
    }
}
