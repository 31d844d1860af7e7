//! Voter utility for a theory under the optimistic, pessimistic and
//! expected-value semantics.
//!
//! All three are undefined on an inconsistent theory; that case is reported as
//! [`Error::InconsistentTheory`] rather than a sentinel value.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::formula::Theory;
use crate::scalar::Scalar;
use crate::voters::{world_utility, Voter, VoterKind};
use crate::worlds::{count_models, scan_chunks, Limits, World};

/// `ut_v(T)` plus the extremal modeled world for optimistic/pessimistic voters.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityResult<S> {
    pub value: S,
    pub witness: Option<World>,
}

/// How the expected-value utility is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpectedMethod {
    /// Sum the utility of every model and divide by the model count.
    #[default]
    Enumerate,
    /// Derive the mean from total and per-variable model counts:
    /// `sum_i p(x_i) * (2 C_i+ - C) / C`.
    Count,
}

fn check_voter<S: Scalar>(theory: &Theory, voter: &Voter<S>) -> Result<()> {
    if voter.num_vars() != theory.num_vars() {
        return Err(Error::UniverseMismatch {
            expected: theory.num_vars(),
            found: voter.num_vars(),
        });
    }
    Ok(())
}

/// First world (in world order) whose utility is extremal in direction `keep`.
fn extremal<S: Scalar>(theory: &Theory, voter: &Voter<S>, limits: &Limits, keep: Ordering) -> Result<UtilityResult<S>> {
    limits.check_vars(theory.num_vars())?;
    check_voter(theory, voter)?;
    let n = theory.num_vars();
    let better = |candidate: &S, incumbent: &S| candidate.partial_cmp(incumbent) == Some(keep);
    let parts = scan_chunks(n, |range| {
        let mut best: Option<(S, World)> = None;
        for w in range.map(|bits| World::new(bits, n)).filter(|w| theory.models(w)) {
            let u = world_utility(voter, &w);
            if best.as_ref().is_none_or(|(b, _)| better(&u, b)) {
                best = Some((u, w));
            }
        }
        best
    });
    let mut best: Option<(S, World)> = None;
    for (u, w) in parts.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| better(&u, b)) {
            best = Some((u, w));
        }
    }
    let (value, witness) = best.ok_or(Error::InconsistentTheory)?;
    Ok(UtilityResult {
        value,
        witness: Some(witness),
    })
}

/// `max { u_v(w) : w |= T }`, witness = first maximiser in world order.
pub fn utility_optimistic<S: Scalar>(theory: &Theory, voter: &Voter<S>, limits: &Limits) -> Result<UtilityResult<S>> {
    extremal(theory, voter, limits, Ordering::Greater)
}

/// `min { u_v(w) : w |= T }`, witness = first minimiser in world order.
pub fn utility_pessimistic<S: Scalar>(theory: &Theory, voter: &Voter<S>, limits: &Limits) -> Result<UtilityResult<S>> {
    extremal(theory, voter, limits, Ordering::Less)
}

/// Mean utility over the models of `theory`.
pub fn utility_expected<S: Scalar>(
    theory: &Theory,
    voter: &Voter<S>,
    method: ExpectedMethod,
    limits: &Limits,
) -> Result<UtilityResult<S>> {
    limits.check_vars(theory.num_vars())?;
    check_voter(theory, voter)?;
    let value = match method {
        ExpectedMethod::Enumerate => expected_by_enumeration(theory, voter)?,
        ExpectedMethod::Count => expected_by_counting(theory, voter, limits)?,
    };
    Ok(UtilityResult { value, witness: None })
}

fn expected_by_enumeration<S: Scalar>(theory: &Theory, voter: &Voter<S>) -> Result<S> {
    let n = theory.num_vars();
    let parts = scan_chunks(n, |range| {
        let mut sum = S::zero();
        let mut count = 0u64;
        for w in range.map(|bits| World::new(bits, n)).filter(|w| theory.models(w)) {
            sum += world_utility(voter, &w);
            count += 1;
        }
        (sum, count)
    });
    let (sum, count) = parts.into_iter().fold((S::zero(), 0u64), |(mut s, c), (ps, pc)| {
        s += ps;
        (s, c + pc)
    });
    if count == 0 {
        return Err(Error::InconsistentTheory);
    }
    Ok(sum / S::from_count(count))
}

fn expected_by_counting<S: Scalar>(theory: &Theory, voter: &Voter<S>, limits: &Limits) -> Result<S> {
    let counts = count_models(theory, limits)?;
    if counts.total == 0 {
        return Err(Error::InconsistentTheory);
    }
    // Each model contributes +p when x_i is true and -p when false, so the
    // signed sum for x_i is p * (C_i+ - (C - C_i+)).
    let total = S::from_count(counts.total);
    let mut numerator = S::zero();
    for (p, &true_count) in voter.prefs().iter().zip(&counts.per_variable_true) {
        let balance = S::from_count(2 * true_count) - total.clone();
        numerator += p.clone() * balance;
    }
    Ok(numerator / total)
}

/// Dispatches on the voter's kind.
pub fn utility<S: Scalar>(theory: &Theory, voter: &Voter<S>, limits: &Limits) -> Result<UtilityResult<S>> {
    match voter.kind {
        VoterKind::Optimistic => utility_optimistic(theory, voter, limits),
        VoterKind::Pessimistic => utility_pessimistic(theory, voter, limits),
        VoterKind::Expected => utility_expected(theory, voter, ExpectedMethod::default(), limits),
    }
}

/// `ut_v(T) >= k`, with `k` taken from the voter when not supplied.
pub fn meets_threshold<S: Scalar>(
    theory: &Theory,
    voter: &Voter<S>,
    threshold: Option<&S>,
    limits: &Limits,
) -> Result<bool> {
    let k = match threshold {
        Some(k) => k,
        None => voter.threshold_or_err()?,
    };
    Ok(utility(theory, voter, limits)?.value >= *k)
}

/// Sum of every voter's utility, each under its own semantics.
pub fn total_utility<S: Scalar>(theory: &Theory, voters: &[Voter<S>], limits: &Limits) -> Result<S> {
    let mut total = S::zero();
    for v in voters {
        total += utility(theory, v, limits)?.value;
    }
    Ok(total)
}
