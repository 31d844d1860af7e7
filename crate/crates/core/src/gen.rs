//! Seeded random instance generators for tests, benchmarks and fixtures.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Formula, Theory, VarUniverse};
use crate::reductions::{Cnf, Literal};
use crate::voters::{Voter, VoterKind};

/// Denominators used for random preferences.
const DENOMINATORS: [i64; 6] = [1, 2, 3, 4, 5, 6];

/// Universe `x1 .. xn`.
pub fn numbered_universe(n: usize) -> VarUniverse {
    VarUniverse::new((1..=n).map(|i| format!("x{i}"))).expect("numbered names are distinct")
}

/// Random formula of bounded depth over variables `0..n` (`n >= 1`).
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, n: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.05) {
            Formula::Const(rng.gen())
        } else {
            Formula::Var(rng.gen_range(0..n))
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::negate(random_formula(rng, n, depth - 1)),
        1 | 2 => {
            let k = rng.gen_range(2..=3);
            Formula::And((0..k).map(|_| random_formula(rng, n, depth - 1)).collect())
        }
        3 => {
            let k = rng.gen_range(2..=3);
            Formula::Or((0..k).map(|_| random_formula(rng, n, depth - 1)).collect())
        }
        4 => Formula::implies(random_formula(rng, n, depth - 1), random_formula(rng, n, depth - 1)),
        _ => Formula::iff(random_formula(rng, n, depth - 1), random_formula(rng, n, depth - 1)),
    }
}

/// Random clause set: each clause draws `width` distinct variables.
pub fn random_cnf<R: Rng + ?Sized>(rng: &mut R, n: usize, clauses: usize, width: usize) -> Cnf {
    let vars: Vec<usize> = (0..n).collect();
    let clauses = (0..clauses)
        .map(|_| {
            vars.choose_multiple(rng, width.min(n))
                .map(|&var| Literal {
                    var,
                    positive: rng.gen(),
                })
                .collect()
        })
        .collect();
    Cnf { clauses }
}

/// Random rational in `[-1, 1]` with a small denominator.
pub fn random_preference<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let den = *DENOMINATORS.choose(rng).unwrap();
    let num = rng.gen_range(-den..=den);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn random_voter<R: Rng + ?Sized>(
    rng: &mut R,
    id: impl Into<String>,
    kind: VoterKind,
    n: usize,
) -> Voter<BigRational> {
    let prefs = (0..n)
        .map(|_| {
            if rng.gen_bool(0.2) {
                BigRational::from_integer(0.into())
            } else {
                random_preference(rng)
            }
        })
        .collect();
    Voter::new(id, kind, prefs).expect("generated preferences lie in [-1, 1]")
}

/// Random theory with `statements` formulas over `x1 .. xn`. May be unsatisfiable.
pub fn random_theory<R: Rng + ?Sized>(rng: &mut R, n: usize, statements: usize, depth: usize) -> Theory {
    let universe = numbered_universe(n);
    let fs = (0..statements).map(|_| random_formula(rng, n.max(1), depth)).collect();
    if n == 0 {
        return Theory::new(universe);
    }
    Theory::with_statements(universe, fs).expect("generated formulas use universe variables")
}
