//! Brute-force oracles shared by the integration tests. Nothing here calls the
//! library's evaluation, enumeration or strategy code.
#![allow(dead_code)]

use campaign_core::gen::{random_formula, random_theory};
use campaign_core::reductions::Cnf;
use campaign_core::{Formula, Rational, Theory, VoterKind};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// All assignments over `n` variables, first variable most significant.
pub fn assignments(n: usize) -> Vec<Vec<bool>> {
    (0..1u64 << n)
        .map(|bits| (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect())
        .collect()
}

pub fn eval(f: &Formula, a: &[bool]) -> bool {
    match f {
        Formula::Var(i) => a[*i],
        Formula::Const(b) => *b,
        Formula::Not(g) => !eval(g, a),
        Formula::And(gs) => gs.iter().all(|g| eval(g, a)),
        Formula::Or(gs) => gs.iter().any(|g| eval(g, a)),
        Formula::Implies(l, r) => !eval(l, a) || eval(r, a),
        Formula::Iff(l, r) => eval(l, a) == eval(r, a),
    }
}

pub fn models(theory: &Theory) -> Vec<Vec<bool>> {
    assignments(theory.num_vars())
        .into_iter()
        .filter(|a| theory.statements().iter().all(|f| eval(f, a)))
        .collect()
}

pub fn formula_models(n: usize, f: &Formula) -> Vec<Vec<bool>> {
    assignments(n).into_iter().filter(|a| eval(f, a)).collect()
}

pub fn sat(n: usize, f: &Formula) -> bool {
    assignments(n).iter().any(|a| eval(f, a))
}

pub fn count(n: usize, f: &Formula) -> u64 {
    formula_models(n, f).len() as u64
}

pub fn cnf_sat(n: usize, cnf: &Cnf) -> bool {
    assignments(n).iter().any(|a| {
        cnf.clauses
            .iter()
            .all(|c| c.iter().any(|lit| a[lit.var] == lit.positive))
    })
}

/// `sum_i p_i * (+1 | -1)`.
pub fn world_util(prefs: &[Rational], a: &[bool]) -> Rational {
    prefs
        .iter()
        .zip(a)
        .fold(Rational::zero(), |acc, (p, &b)| if b { acc + p } else { acc - p })
}

pub fn optimistic(theory: &Theory, prefs: &[Rational]) -> Option<Rational> {
    models(theory).iter().map(|a| world_util(prefs, a)).max()
}

pub fn pessimistic(theory: &Theory, prefs: &[Rational]) -> Option<Rational> {
    models(theory).iter().map(|a| world_util(prefs, a)).min()
}

pub fn expected(theory: &Theory, prefs: &[Rational]) -> Option<Rational> {
    let ms = models(theory);
    if ms.is_empty() {
        return None;
    }
    let sum = ms.iter().fold(Rational::zero(), |acc, a| acc + world_util(prefs, a));
    Some(sum / Rational::from_integer((ms.len() as i64).into()))
}

pub fn utility(theory: &Theory, kind: VoterKind, prefs: &[Rational]) -> Option<Rational> {
    match kind {
        VoterKind::Optimistic => optimistic(theory, prefs),
        VoterKind::Pessimistic => pessimistic(theory, prefs),
        VoterKind::Expected => expected(theory, prefs),
    }
}

/// Best total of a population over single worlds.
pub fn best_complete_total(n: usize, population: &[Vec<Rational>]) -> Rational {
    assignments(n)
        .iter()
        .map(|a| {
            population
                .iter()
                .fold(Rational::zero(), |acc, p| acc + world_util(p, a))
        })
        .max()
        .expect("at least one world")
}

/// Optimal MAX- or MIN-WSAT weight, `None` when unsatisfiable.
pub fn wsat(n: usize, f: &Formula, weights: &[Rational], maximize: bool) -> Option<Rational> {
    let values = formula_models(n, f).into_iter().map(|a| {
        weights
            .iter()
            .zip(&a)
            .filter(|(_, &b)| b)
            .fold(Rational::zero(), |acc, (w, _)| acc + w)
    });
    if maximize {
        values.max()
    } else {
        values.min()
    }
}

/// Turnout voter for the world-subset oracle.
#[derive(Debug, Clone)]
pub struct TurnoutVoter {
    pub kind: VoterKind,
    pub prefs: Vec<Rational>,
    pub threshold: Rational,
}

/// Largest number of voters any consistent theory satisfies, found by trying
/// every nonempty set of worlds as the theory's model set (`n <= 4`).
pub fn turnout_subset_max(n: usize, voters: &[TurnoutVoter]) -> usize {
    assert!(n <= 4, "subset oracle is exponential in 2^n");
    let worlds = assignments(n);
    let acceptable: Vec<u32> = voters
        .iter()
        .map(|v| {
            worlds
                .iter()
                .enumerate()
                .filter(|(_, a)| world_util(&v.prefs, a) >= v.threshold)
                .fold(0u32, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let all: u32 = if worlds.len() == 32 {
        u32::MAX
    } else {
        (1u32 << worlds.len()) - 1
    };
    let mut best = 0;
    for subset in 1..=all {
        let satisfied = voters
            .iter()
            .zip(&acceptable)
            .filter(|(v, &acc)| match v.kind {
                VoterKind::Optimistic => subset & acc != 0,
                VoterKind::Pessimistic => subset & !acc == 0,
                VoterKind::Expected => unreachable!("turnout voters are optimistic or pessimistic"),
            })
            .count();
        best = best.max(satisfied);
        if best == voters.len() {
            break;
        }
    }
    best
}

/// Random theory over `x1..xn` that has at least one model.
pub fn satisfiable_theory(rng: &mut impl Rng, n: usize, statements: usize, depth: usize) -> Theory {
    loop {
        let t = random_theory(rng, n, statements, depth);
        if !models(&t).is_empty() {
            return t;
        }
    }
}

/// Random formula over `n >= 1` variables with at least one model.
pub fn satisfiable_formula(rng: &mut impl Rng, n: usize, depth: usize) -> Formula {
    loop {
        let f = random_formula(rng, n, depth);
        if sat(n, &f) {
            return f;
        }
    }
}

/// Positive rational weight with a small denominator.
pub fn random_weight(rng: &mut impl Rng) -> Rational {
    let den = rng.gen_range(1..=5i64);
    q(rng.gen_range(1..=4 * den), den)
}

pub fn one() -> Rational {
    Rational::one()
}

/// A CLI invocation whose output is pinned by a golden file.
pub struct CliCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Files the command writes under `{out}`, appended to the capture.
    pub writes: &'static [&'static str],
}

const FX: &str = "tests/fixtures";

pub fn cli_cases() -> Vec<CliCase> {
    vec![
        CliCase {
            name: "eval_sample",
            args: &[
                "eval",
                "--theory",
                "{fx}/sample_theory.txt",
                "--voters",
                "{fx}/sample_voters.json",
            ],
            writes: &[],
        },
        CliCase {
            name: "eval_sample_machine",
            args: &[
                "eval",
                "--machine",
                "--theory",
                "{fx}/sample_theory.txt",
                "--voters",
                "{fx}/sample_voters.json",
            ],
            writes: &[],
        },
        CliCase {
            name: "eval_empty_theory",
            args: &[
                "eval",
                "--theory",
                "{fx}/empty_theory.txt",
                "--voters",
                "{fx}/expected_voters.json",
                "--voter",
                "e1",
            ],
            writes: &[],
        },
        CliCase {
            name: "eval_wide",
            args: &[
                "eval",
                "--theory",
                "{fx}/wide_theory.txt",
                "--voters",
                "{fx}/wide_voters.json",
            ],
            writes: &[],
        },
        CliCase {
            name: "optimize_expected",
            args: &["optimize", "--voters", "{fx}/expected_voters.json"],
            writes: &[],
        },
        CliCase {
            name: "optimize_pessimistic_machine",
            args: &["optimize", "--machine", "--voters", "{fx}/pessimist_voters.json"],
            writes: &[],
        },
        CliCase {
            name: "complete_sample",
            args: &[
                "complete",
                "--theory",
                "{fx}/sample_theory.txt",
                "--voters",
                "{fx}/expected_voters.json",
            ],
            writes: &[],
        },
        CliCase {
            name: "turnout_pessimistic",
            args: &["turnout", "--voters", "{fx}/pessimist_voters.json", "--h", "2"],
            writes: &[],
        },
        CliCase {
            name: "turnout_mixed",
            args: &["turnout", "--voters", "{fx}/mixed_voters.json", "--h", "3"],
            writes: &[],
        },
        CliCase {
            name: "turnout_wide_no",
            args: &[
                "turnout",
                "--machine",
                "--voters",
                "{fx}/wide_pessimists.json",
                "--h",
                "4",
            ],
            writes: &[],
        },
        CliCase {
            name: "turnout_expected_error",
            args: &["turnout", "--voters", "{fx}/sample_voters.json", "--h", "1"],
            writes: &[],
        },
        CliCase {
            name: "count_cnf_both",
            args: &["count", "--formula", "{fx}/small.cnf", "--via", "both", "--machine"],
            writes: &[],
        },
        CliCase {
            name: "count_unsat_both",
            args: &["count", "--formula", "{fx}/unsat.cnf", "--via", "both"],
            writes: &[],
        },
        CliCase {
            name: "count_wide",
            args: &["count", "--formula", "{fx}/wide_formula.txt", "--via", "both"],
            writes: &[],
        },
        CliCase {
            name: "reduce_sat_optimistic",
            args: &[
                "reduce",
                "sat-optimistic",
                "--formula",
                "{fx}/small.cnf",
                "--out",
                "{out}",
            ],
            writes: &["theory.txt", "voters.json"],
        },
        CliCase {
            name: "reduce_unsat_pessimistic",
            args: &[
                "reduce",
                "unsat-pessimistic",
                "--formula",
                "{fx}/formula.txt",
                "--out",
                "{out}",
            ],
            writes: &["theory.txt", "voters.json"],
        },
        CliCase {
            name: "reduce_wsat_min",
            args: &[
                "reduce",
                "wsat",
                "--formula",
                "{fx}/wsat_formula.txt",
                "--weights",
                "a=2,b=1/2,c=3,d=5/3",
                "--direction",
                "min",
                "--out",
                "{out}",
            ],
            writes: &["theory.txt", "voters.json"],
        },
        CliCase {
            name: "reduce_count",
            args: &[
                "reduce",
                "count",
                "--formula",
                "{fx}/small.cnf",
                "--out",
                "{out}",
                "--machine",
            ],
            writes: &["psi.txt", "psi_prime.txt", "voters.json"],
        },
        CliCase {
            name: "reduce_cnf_turnout",
            args: &["reduce", "cnf-turnout", "--formula", "{fx}/small.cnf", "--out", "{out}"],
            writes: &["voters.json"],
        },
    ]
}

pub fn manifest_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(case: &CliCase) -> std::path::PathBuf {
    manifest_dir()
        .join(FX)
        .join("golden")
        .join(format!("{}.out", case.name))
}

/// Runs `case` with `--threads threads` and returns exit status, stdout,
/// stderr and written files as one string.
pub fn run_cli_case(case: &CliCase, threads: usize) -> String {
    let out_dir = tempfile::tempdir().expect("temp dir");
    let out = out_dir.path().to_str().expect("utf-8 temp path").to_string();
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| a.replace("{fx}", FX).replace("{out}", &out))
        .chain(["--threads".to_string(), threads.to_string()])
        .collect();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_campaign"))
        .args(&args)
        .current_dir(manifest_dir())
        .output()
        .expect("campaign binary runs");
    let mut capture = format!("$ campaign {}\n", case.args.join(" "));
    capture += &format!("exit: {}\n", output.status.code().unwrap_or(-1));
    capture += &String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    if !stderr.is_empty() {
        capture += "stderr:\n";
        capture += &stderr;
    }
    for file in case.writes {
        let text = std::fs::read_to_string(out_dir.path().join(file)).unwrap_or_else(|e| format!("<missing: {e}>\n"));
        capture += &format!("== {file} ==\n{text}");
    }
    capture.replace(&out, "{out}")
}
