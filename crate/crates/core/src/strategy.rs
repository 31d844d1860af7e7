//! Candidate-side solvers: optimal complete theories, optimal completions of
//! an existing theory, and the turnout problems for thresholded voters.

use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, VarUniverse};
use crate::scalar::Scalar;
use crate::voters::{aggregate_counted, best_possible_utility, check_population, world_utility, Voter, VoterKind};
use crate::worlds::{all_worlds, scan_chunks, Limits, World};

/// Largest universe accepted by [`brute_force_best_theory`].
pub const BRUTE_FORCE_MAX_VARS: usize = 12;

/// Hard cap on pessimistic voters in mixed turnout (subset tables are `2^p`).
pub const MIXED_PESSIMIST_CAP: usize = 30;

/// A theory chosen by a strategy solver together with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult<S> {
    pub theory: Theory,
    /// Total population utility of `theory`.
    pub total: S,
    /// The single world modeled by `theory`.
    pub world: World,
}

fn total_world_utility<S: Scalar>(voters: &[Voter<S>], world: &World) -> S {
    let mut total = S::zero();
    for v in voters {
        total += world_utility(v, world);
    }
    total
}

fn literal_theory(universe: &VarUniverse, world: &World) -> Theory {
    let literals = (0..world.len()).map(|i| Formula::literal(i, world.get(i))).collect();
    Theory::with_statements(universe.clone(), literals).expect("literals range over the universe")
}

fn check_complete_kind<S: Scalar>(voters: &[Voter<S>], kind: VoterKind) -> Result<()> {
    if kind == VoterKind::Optimistic {
        return Err(Error::UnsupportedKind(
            "optimistic populations are best served by the empty theory".into(),
        ));
    }
    if voters.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    match voters.iter().find(|v| v.kind != kind) {
        Some(v) => Err(Error::KindMismatch {
            id: v.id.clone(),
            expected: kind.to_string(),
            found: v.kind.to_string(),
        }),
        None => Ok(()),
    }
}

/// Optimal complete theory for an expected-value or pessimistic population.
///
/// Averages the preferences, then asserts each variable with the sign of its
/// mean (mean exactly zero asserts `true`). Linear in `n * m`.
pub fn optimal_complete_theory<S: Scalar>(
    universe: &VarUniverse,
    voters: &[Voter<S>],
    kind: VoterKind,
) -> Result<StrategyResult<S>> {
    optimal_complete_theory_counted(universe, voters, kind).map(|(r, _)| r)
}

/// [`optimal_complete_theory`] plus the number of scalar arithmetic and
/// comparison operations it performed.
pub fn optimal_complete_theory_counted<S: Scalar>(
    universe: &VarUniverse,
    voters: &[Voter<S>],
    kind: VoterKind,
) -> Result<(StrategyResult<S>, u64)> {
    check_complete_kind(voters, kind)?;
    check_population(voters, universe.len())?;
    let mut ops = 0u64;
    let aggregate = aggregate_counted(voters, &mut ops)?;
    let values: Vec<bool> = aggregate
        .prefs()
        .iter()
        .map(|p| {
            ops += 1;
            !p.is_negative()
        })
        .collect();
    let world = World::from_bools(&values);
    let mut total = S::zero();
    for v in voters {
        for (i, p) in v.prefs().iter().enumerate() {
            if world.get(i) {
                total += p;
            } else {
                total -= p;
            }
            ops += 1;
        }
    }
    let result = StrategyResult {
        theory: literal_theory(universe, &world),
        total,
        world,
    };
    Ok((result, ops))
}

/// Exhaustive optimum over all complete theories (first best world on ties).
pub fn brute_force_best_theory<S: Scalar>(
    universe: &VarUniverse,
    voters: &[Voter<S>],
    kind: VoterKind,
) -> Result<StrategyResult<S>> {
    check_complete_kind(voters, kind)?;
    let n = universe.len();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::VariableLimitExceeded {
            n,
            max: BRUTE_FORCE_MAX_VARS,
        });
    }
    check_population(voters, n)?;
    let mut best: Option<(S, World)> = None;
    for w in all_worlds(n) {
        let total = total_world_utility(voters, &w);
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, w));
        }
    }
    let (total, world) = best.expect("at least one world");
    Ok(StrategyResult {
        theory: literal_theory(universe, &world),
        total,
        world,
    })
}

/// Best completion of `theory`: the modeled world with the largest total
/// utility (first in world order on ties), pinned by one extra statement.
pub fn optimal_completion<S: Scalar>(
    theory: &Theory,
    voters: &[Voter<S>],
    kind: VoterKind,
    limits: &Limits,
) -> Result<StrategyResult<S>> {
    check_complete_kind(voters, kind)?;
    let n = theory.num_vars();
    limits.check_vars(n)?;
    check_population(voters, n)?;
    let parts = scan_chunks(n, |range| {
        let mut best: Option<(S, World)> = None;
        for w in range.map(|bits| World::new(bits, n)).filter(|w| theory.models(w)) {
            let total = total_world_utility(voters, &w);
            if best.as_ref().is_none_or(|(b, _)| total > *b) {
                best = Some((total, w));
            }
        }
        best
    });
    let mut best: Option<(S, World)> = None;
    for (total, w) in parts.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, w));
        }
    }
    let (total, world) = best.ok_or(Error::InconsistentTheory)?;
    let completed = theory.strengthened(Formula::world_conjunction(&world))?;
    Ok(StrategyResult {
        theory: completed,
        total,
        world,
    })
}

/// Voters with thresholds and the number `h` of them that must be satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnoutInstance<S> {
    universe: VarUniverse,
    voters: Vec<Voter<S>>,
    h: usize,
}

impl<S: Scalar> TurnoutInstance<S> {
    pub fn new(universe: VarUniverse, voters: Vec<Voter<S>>, h: usize) -> Result<Self> {
        check_population(&voters, universe.len())?;
        for v in &voters {
            v.threshold_or_err()?;
        }
        if h > voters.len() {
            return Err(Error::InvalidInstance(format!(
                "h = {h} exceeds the {} voters",
                voters.len()
            )));
        }
        Ok(Self { universe, voters, h })
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn voters(&self) -> &[Voter<S>] {
        &self.voters
    }

    pub fn h(&self) -> usize {
        self.h
    }

    fn threshold(&self, i: usize) -> &S {
        self.voters[i].threshold.as_ref().expect("validated on construction")
    }

    fn require_kinds(&self, allowed: &[VoterKind]) -> Result<()> {
        match self.voters.iter().find(|v| !allowed.contains(&v.kind)) {
            Some(v) => Err(Error::KindMismatch {
                id: v.id.clone(),
                expected: allowed.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(" or "),
                found: v.kind.to_string(),
            }),
            None => Ok(()),
        }
    }

    /// Does voter `i` accept world `w` (`u_i(w) >= k_i`)?
    fn accepts(&self, i: usize, w: &World) -> bool {
        world_utility(&self.voters[i], w) >= *self.threshold(i)
    }
}

/// Outcome of a turnout problem.
///
/// `witness` is a theory reaching `satisfied.len()` voters; on a NO answer it
/// is the best theory found, which satisfies fewer than `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnoutOutcome<S> {
    pub decision: bool,
    /// Ids of the voters whose thresholds `witness` meets, in population order.
    pub satisfied: Vec<String>,
    pub witness: Theory,
    /// Set when the witness is a complete theory.
    pub witness_world: Option<World>,
    /// Best attainable utility per voter (optimistic populations only).
    pub best_utilities: Option<Vec<S>>,
}

impl<S> TurnoutOutcome<S> {
    pub fn satisfied_count(&self) -> usize {
        self.satisfied.len()
    }
}

/// All-optimistic turnout. The empty theory maximises every optimistic
/// utility, so each voter is satisfiable iff `sum |p| >= k`.
pub fn optimistic_turnout<S: Scalar>(inst: &TurnoutInstance<S>) -> Result<TurnoutOutcome<S>> {
    inst.require_kinds(&[VoterKind::Optimistic])?;
    let best: Vec<S> = inst.voters.iter().map(best_possible_utility).collect();
    let satisfied: Vec<String> = inst
        .voters
        .iter()
        .zip(&best)
        .enumerate()
        .filter(|(i, (_, b))| **b >= *inst.threshold(*i))
        .map(|(_, (v, _))| v.id.clone())
        .collect();
    Ok(TurnoutOutcome {
        decision: satisfied.len() >= inst.h,
        satisfied,
        witness: Theory::new(inst.universe.clone()),
        witness_world: None,
        best_utilities: Some(best),
    })
}

/// All-pessimistic turnout. A theory satisfying a set of pessimists keeps
/// satisfying them after completion, so scanning single worlds is enough.
/// The witness is the first world meeting `h` thresholds, or on NO the first
/// world with the largest satisfied count.
pub fn pessimistic_turnout<S: Scalar>(inst: &TurnoutInstance<S>, limits: &Limits) -> Result<TurnoutOutcome<S>> {
    inst.require_kinds(&[VoterKind::Pessimistic])?;
    let n = inst.universe.len();
    limits.check_vars(n)?;
    let m = inst.voters.len();
    let h = inst.h;
    // Per chunk: first world reaching h, and first world with the best count.
    let parts = scan_chunks(n, |range| {
        let mut hit: Option<World> = None;
        let mut best: Option<(usize, World)> = None;
        for w in range.map(|bits| World::new(bits, n)) {
            let count = (0..m).filter(|&i| inst.accepts(i, &w)).count();
            if hit.is_none() && count >= h {
                hit = Some(w);
            }
            if best.is_none_or(|(c, _)| count > c) {
                best = Some((count, w));
            }
        }
        (hit, best)
    });
    let hit = parts.iter().find_map(|(hit, _)| *hit);
    let best = parts
        .iter()
        .filter_map(|(_, b)| *b)
        .fold(None, |acc: Option<(usize, World)>, (c, w)| match acc {
            Some((bc, _)) if bc >= c => acc,
            _ => Some((c, w)),
        })
        .expect("at least one world");
    let world = hit.unwrap_or(best.1);
    let satisfied = (0..m)
        .filter(|&i| inst.accepts(i, &world))
        .map(|i| inst.voters[i].id.clone())
        .collect();
    Ok(TurnoutOutcome {
        decision: hit.is_some(),
        satisfied,
        witness: literal_theory(&inst.universe, &world),
        witness_world: Some(world),
        best_utilities: None,
    })
}

/// Turnout with optimistic and pessimistic voters.
///
/// Some optimal theory is a disjunction of worlds. For a set `P` of
/// pessimists let `A(P)` be the worlds every member of `P` accepts; when
/// `A(P)` is nonempty, the disjunction of suitable worlds in `A(P)` satisfies
/// all of `P` plus every optimist that accepts at least one world of `A(P)`.
/// The maximum over all `P` is the optimum. Subset-closed queries are answered
/// with superset-OR tables indexed by pessimist masks, so the work is
/// `O(2^n * m + 2^p * p * m)`.
pub fn mixed_turnout<S: Scalar>(inst: &TurnoutInstance<S>, limits: &Limits) -> Result<TurnoutOutcome<S>> {
    inst.require_kinds(&[VoterKind::Optimistic, VoterKind::Pessimistic])?;
    let n = inst.universe.len();
    limits.check_vars(n)?;
    let pessimists: Vec<usize> = (0..inst.voters.len())
        .filter(|&i| inst.voters[i].kind == VoterKind::Pessimistic)
        .collect();
    let optimists: Vec<usize> = (0..inst.voters.len())
        .filter(|&i| inst.voters[i].kind == VoterKind::Optimistic)
        .collect();
    let p = pessimists.len();
    let cap = limits.p_max.min(MIXED_PESSIMIST_CAP);
    if p > cap {
        return Err(Error::PopulationLimitExceeded { count: p, max: cap });
    }

    // Mask of pessimists accepting each world.
    let safe: Vec<u32> = scan_chunks(n, |range| {
        range
            .map(|bits| {
                let w = World::new(bits, n);
                pessimists
                    .iter()
                    .enumerate()
                    .filter(|(_, &i)| inst.accepts(i, &w))
                    .fold(0u32, |mask, (b, _)| mask | (1 << b))
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();

    let subsets = 1usize << p;
    let superset_or = |table: &mut Vec<bool>| {
        for b in 0..p {
            for mask in 0..subsets {
                if mask & (1 << b) == 0 && table[mask | (1 << b)] {
                    table[mask] = true;
                }
            }
        }
    };

    let mut nonempty = vec![false; subsets];
    for &mask in &safe {
        nonempty[mask as usize] = true;
    }
    superset_or(&mut nonempty);

    let mut optimist_hits = vec![0u32; subsets];
    let mut table = vec![false; subsets];
    for &i in &optimists {
        table.iter_mut().for_each(|t| *t = false);
        for (bits, &mask) in safe.iter().enumerate() {
            if !table[mask as usize] && inst.accepts(i, &World::new(bits as u64, n)) {
                table[mask as usize] = true;
            }
        }
        superset_or(&mut table);
        for (hits, &t) in optimist_hits.iter_mut().zip(&table) {
            *hits += t as u32;
        }
    }

    // A(empty) is every world, so some mask always qualifies.
    let mut best: Option<(usize, usize)> = None;
    for mask in (0..subsets).filter(|&mask| nonempty[mask]) {
        let score = mask.count_ones() as usize + optimist_hits[mask] as usize;
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((mask, score));
        }
    }
    let (chosen, best_score) = best.expect("empty pessimist set always qualifies");

    let allowed = |bits: usize| safe[bits] as usize & chosen == chosen;
    let mut worlds: Vec<u64> = Vec::new();
    for &i in &optimists {
        let found = (0..safe.len())
            .filter(|&bits| allowed(bits))
            .find(|&bits| inst.accepts(i, &World::new(bits as u64, n)));
        if let Some(bits) = found {
            worlds.push(bits as u64);
        }
    }
    if worlds.is_empty() {
        let first = (0..safe.len()).find(|&bits| allowed(bits)).expect("A(P) nonempty");
        worlds.push(first as u64);
    }
    worlds.sort_unstable();
    worlds.dedup();
    let worlds: Vec<World> = worlds.into_iter().map(|b| World::new(b, n)).collect();

    let satisfied: Vec<String> = (0..inst.voters.len())
        .filter(|&i| match inst.voters[i].kind {
            VoterKind::Optimistic => worlds.iter().any(|w| inst.accepts(i, w)),
            _ => worlds.iter().all(|w| inst.accepts(i, w)),
        })
        .map(|i| inst.voters[i].id.clone())
        .collect();
    debug_assert_eq!(satisfied.len(), best_score);

    let disjunction = Formula::or_all(worlds.iter().map(Formula::world_conjunction).collect());
    let witness = Theory::with_statements(inst.universe.clone(), vec![disjunction])?;
    Ok(TurnoutOutcome {
        decision: best_score >= inst.h,
        satisfied,
        witness,
        witness_world: (worlds.len() == 1).then(|| worlds[0]),
        best_utilities: None,
    })
}

/// Routes to the optimistic, pessimistic or mixed solver by population kinds.
pub fn turnout<S: Scalar>(inst: &TurnoutInstance<S>, limits: &Limits) -> Result<TurnoutOutcome<S>> {
    if let Some(v) = inst.voters.iter().find(|v| v.kind == VoterKind::Expected) {
        return Err(Error::UnsupportedKind(format!(
            "turnout is defined for optimistic and pessimistic voters, `{}` is expected-value",
            v.id
        )));
    }
    let optimists = inst.voters.iter().filter(|v| v.kind == VoterKind::Optimistic).count();
    if optimists == inst.voters.len() {
        optimistic_turnout(inst)
    } else if optimists == 0 {
        pessimistic_turnout(inst, limits)
    } else {
        mixed_turnout(inst, limits)
    }
}
