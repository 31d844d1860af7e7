mod common;

use campaign_core::evaluation::{total_utility, utility_expected, utility_optimistic, utility_pessimistic};
use campaign_core::gen::numbered_universe;
use campaign_core::reductions::{
    cnfsat_to_pessimistic_turnout, sat_to_optimistic_threshold, unsat_to_pessimistic_threshold, wsat_to_evaluation,
    Cnf, CountGadget, Literal, WsatDirection,
};
use campaign_core::strategy::{optimal_complete_theory, optimal_completion, turnout};
use campaign_core::voters::aggregate_preferences;
use campaign_core::worlds::{all_worlds, count_models, enumerate_models};
use campaign_core::{
    ExpectedMethod, FloatVoter, Formula, Limits, Rational, SmallVoter, Theory, TurnoutInstance, VarUniverse, Voter,
    VoterKind, World, WsatInstance,
};
use common::{eval, q};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use proptest::collection::vec;
use proptest::prelude::*;

fn formula(n: usize) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        6 => (0..n).prop_map(Formula::Var),
        1 => any::<bool>().prop_map(Formula::Const),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::negate),
            vec(inner.clone(), 2..=3).prop_map(Formula::And),
            vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn preference() -> impl Strategy<Value = Rational> {
    (1i64..=6).prop_flat_map(|den| (-den..=den).prop_map(move |num| q(num, den)))
}

fn prefs(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    vec(preference(), n)
}

/// A universe size with a formula list over it.
fn theory_parts(max_n: usize, max_statements: usize) -> impl Strategy<Value = (usize, Vec<Formula>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), vec(formula(n), 0..=max_statements)))
}

fn theory(n: usize, statements: Vec<Formula>) -> Theory {
    Theory::with_statements(numbered_universe(n), statements).unwrap()
}

fn voter(kind: VoterKind, prefs: Vec<Rational>) -> Voter {
    Voter::new("v", kind, prefs).unwrap()
}

fn worlds(n: usize) -> Vec<World> {
    all_worlds(n).collect()
}

fn bools(w: &World) -> Vec<bool> {
    w.values().collect()
}

fn limits() -> Limits {
    Limits::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_formulas_parse_back(n in 1usize..=4, f in formula(4)) {
        let u = numbered_universe(4);
        let text = f.display(&u).to_string();
        let g = Formula::parse(&text, &u).unwrap();
        prop_assert_eq!(&g, &f, "{}", text);
        for w in worlds(4) {
            prop_assert_eq!(g.evaluate(&w), f.evaluate(&w));
        }
        // Restricted universes print and parse the same way.
        let small = numbered_universe(n);
        if f.var_bound() <= n {
            prop_assert_eq!(Formula::parse(&f.display(&small).to_string(), &small).unwrap(), f);
        }
    }

    #[test]
    fn evaluation_matches_reference((n, fs) in theory_parts(6, 3)) {
        let t = theory(n, fs.clone());
        for w in worlds(n) {
            let a = bools(&w);
            for f in &fs {
                prop_assert_eq!(f.evaluate(&w), eval(f, &a));
            }
            if !fs.is_empty() {
                prop_assert_eq!(t.models(&w), t.conjunction().evaluate(&w));
            }
        }
    }

    #[test]
    fn counting_agrees_with_enumeration((n, fs) in theory_parts(10, 3)) {
        let t = theory(n, fs);
        let models = enumerate_models(&t, &limits()).unwrap();
        let c = count_models(&t, &limits()).unwrap();
        prop_assert_eq!(c.total as usize, models.len());
        for i in 0..n {
            prop_assert_eq!(c.per_variable_true[i] as usize, models.iter().filter(|w| w.get(i)).count());
        }
        prop_assert_eq!(models.iter().map(bools).collect::<Vec<_>>(), common::models(&t));
    }

    #[test]
    fn fresh_variable_doubles_counts((n, fs) in theory_parts(8, 3)) {
        let t = theory(n, fs.clone());
        let mut u = numbered_universe(n);
        u.add_fresh("x1");
        let wider = Theory::with_statements(u, fs).unwrap();
        let a = count_models(&t, &limits()).unwrap();
        let b = count_models(&wider, &limits()).unwrap();
        prop_assert_eq!(b.total, 2 * a.total);
        for i in 0..n {
            prop_assert_eq!(b.per_variable_true[i], 2 * a.per_variable_true[i]);
        }
        prop_assert_eq!(b.per_variable_true[n], a.total);
    }

    #[test]
    fn strengthening_shrinks_models((n, fs) in theory_parts(8, 2), extra in formula(8)) {
        let extra = extra.remap(&|i| i % n);
        let t = theory(n, fs);
        let t2 = t.strengthened(extra).unwrap();
        let before = enumerate_models(&t, &limits()).unwrap();
        for w in enumerate_models(&t2, &limits()).unwrap() {
            prop_assert!(before.contains(&w));
        }
    }

    #[test]
    fn world_utility_bounds_and_linearity(p in prefs(4), r in prefs(4)) {
        let v = voter(VoterKind::Optimistic, p.clone());
        let bound = p.iter().fold(Rational::zero(), |acc, x| acc + x.abs());
        let half = q(1, 2);
        let mix: Vec<Rational> = p.iter().zip(&r).map(|(a, b)| (a + b) * &half).collect();
        let vr = voter(VoterKind::Optimistic, r.clone());
        let vm = voter(VoterKind::Optimistic, mix);
        for w in worlds(4) {
            let u = v.world_utility(&w);
            prop_assert!(u.abs() <= bound);
            prop_assert_eq!(&u, &common::world_util(&p, &bools(&w)));
            prop_assert_eq!(vm.world_utility(&w), (u + vr.world_utility(&w)) * &half);
        }
        prop_assert_eq!(v.best_possible_utility(), bound);
    }

    #[test]
    fn aggregate_voter_matches_population(population in vec(prefs(4), 1..=6)) {
        let voters: Vec<Voter> = population.iter().cloned().map(|p| voter(VoterKind::Expected, p)).collect();
        let agg = aggregate_preferences(&voters).unwrap();
        let m = Rational::from_integer((voters.len() as i64).into());
        for w in worlds(4) {
            let total = voters.iter().fold(Rational::zero(), |acc, v| acc + v.world_utility(&w));
            prop_assert_eq!(total, agg.world_utility(&w) * &m);
        }
    }

    #[test]
    fn semantics_ordered_dual_and_dual_path((n, fs) in theory_parts(7, 3), p in prefs(7)) {
        let t = theory(n, fs);
        prop_assume!(!common::models(&t).is_empty());
        let v = voter(VoterKind::Expected, p[..n].to_vec());
        let neg = v.negated();
        let opt = utility_optimistic(&t, &v, &limits()).unwrap();
        let pes = utility_pessimistic(&t, &v, &limits()).unwrap();
        let exp = utility_expected(&t, &v, ExpectedMethod::Enumerate, &limits()).unwrap().value;
        let exp_count = utility_expected(&t, &v, ExpectedMethod::Count, &limits()).unwrap().value;
        prop_assert!(pes.value <= exp && exp <= opt.value);
        prop_assert_eq!(&exp, &exp_count);
        prop_assert_eq!(utility_optimistic(&t, &neg, &limits()).unwrap().value, -pes.value.clone());
        prop_assert_eq!(utility_pessimistic(&t, &neg, &limits()).unwrap().value, -opt.value.clone());
        prop_assert_eq!(utility_expected(&t, &neg, ExpectedMethod::Count, &limits()).unwrap().value, -exp);
        // Witnesses are models achieving the value, first in world order.
        for (r, best) in [(&opt, true), (&pes, false)] {
            let w = r.witness.unwrap();
            prop_assert!(t.models(&w));
            prop_assert_eq!(&v.world_utility(&w), &r.value);
            let first = enumerate_models(&t, &limits()).unwrap().into_iter().find(|x| v.world_utility(x) == r.value);
            prop_assert_eq!(Some(w), first, "first {} witness", if best { "max" } else { "min" });
        }
    }

    #[test]
    fn complete_theories_equalise_semantics(n in 1usize..=6, bits in any::<u64>(), p in prefs(6)) {
        let w = World::new(bits % (1 << n), n);
        let t = theory(n, vec![Formula::world_conjunction(&w)]);
        let v = voter(VoterKind::Expected, p[..n].to_vec());
        let u = v.world_utility(&w);
        prop_assert_eq!(&utility_optimistic(&t, &v, &limits()).unwrap().value, &u);
        prop_assert_eq!(&utility_pessimistic(&t, &v, &limits()).unwrap().value, &u);
        prop_assert_eq!(&utility_expected(&t, &v, ExpectedMethod::Count, &limits()).unwrap().value, &u);
    }

    #[test]
    fn machine_scalars_agree_with_big_rationals(p in vec((-8i64..=8, prop_oneof![Just(1i64), Just(2), Just(4), Just(8)]), 5)) {
        let p: Vec<(i64, i64)> = p.into_iter().map(|(a, d)| (a.clamp(-d, d), d)).collect();
        let big = voter(VoterKind::Pessimistic, p.iter().map(|&(a, d)| q(a, d)).collect());
        let small = SmallVoter::new("s", VoterKind::Pessimistic, p.iter().map(|&(a, d)| Rational64::new(a, d)).collect()).unwrap();
        let float = FloatVoter::new("f", VoterKind::Pessimistic, p.iter().map(|&(a, d)| a as f64 / d as f64).collect()).unwrap();
        let t = theory(5, vec![Formula::Or(vec![Formula::Var(0), Formula::Var(3)])]);
        let b = utility_pessimistic(&t, &big, &limits()).unwrap();
        let s = utility_pessimistic(&t, &small, &limits()).unwrap();
        let f = utility_pessimistic(&t, &float, &limits()).unwrap();
        prop_assert_eq!(b.witness, s.witness);
        prop_assert_eq!(b.witness, f.witness);
        prop_assert_eq!(q(*s.value.numer(), *s.value.denom()), b.value.clone());
        prop_assert_eq!(f.value, num_traits::ToPrimitive::to_f64(&b.value).unwrap());
    }

    #[test]
    fn optimal_theories_reevaluate_to_their_totals(
        population in (1usize..=6).prop_flat_map(|n| vec(prefs(n), 1..=5)),
        pessimistic in any::<bool>(),
        extra in formula(6),
    ) {
        let n = population[0].len();
        let kind = if pessimistic { VoterKind::Pessimistic } else { VoterKind::Expected };
        let voters: Vec<Voter> = population.into_iter().map(|p| voter(kind, p)).collect();
        let r = optimal_complete_theory(&numbered_universe(n), &voters, kind).unwrap();
        prop_assert_eq!(total_utility(&r.theory, &voters, &limits()).unwrap(), r.total.clone());

        let base = theory(n, vec![extra.remap(&|i| i % n)]);
        prop_assume!(!common::models(&base).is_empty());
        let c = optimal_completion(&base, &voters, kind, &limits()).unwrap();
        prop_assert_eq!(total_utility(&c.theory, &voters, &limits()).unwrap(), c.total.clone());
        prop_assert_eq!(enumerate_models(&c.theory, &limits()).unwrap(), vec![c.world]);
        prop_assert!(base.models(&c.world));
        prop_assert!(c.total <= r.total);
    }

    #[test]
    fn turnout_witnesses_and_scaling(
        n in 1usize..=4,
        raw in vec((prefs(4), any::<bool>(), -6i64..=6), 1..=5),
        scale in prop_oneof![Just(q(1, 2)), Just(q(1, 3)), Just(q(2, 3)), Just(q(1, 1))],
        h in 0usize..=5,
    ) {
        let voters: Vec<Voter> = raw
            .iter()
            .enumerate()
            .map(|(i, (p, opt, k))| {
                let kind = if *opt { VoterKind::Optimistic } else { VoterKind::Pessimistic };
                Voter::new(format!("v{i}"), kind, p[..n].to_vec()).unwrap().with_threshold(q(*k, 2))
            })
            .collect();
        let h = h.min(voters.len());
        let inst = TurnoutInstance::new(numbered_universe(n), voters.clone(), h).unwrap();
        let out = turnout(&inst, &limits()).unwrap();
        let reached: Vec<String> = voters
            .iter()
            .filter(|v| common::utility(&out.witness, v.kind, v.prefs()).is_some_and(|u| &u >= v.threshold.as_ref().unwrap()))
            .map(|v| v.id.clone())
            .collect();
        prop_assert_eq!(&reached, &out.satisfied);
        if out.decision {
            prop_assert!(reached.len() >= h);
        }
        if voters.iter().all(|v| v.kind == VoterKind::Pessimistic) && out.decision && h == voters.len() {
            let w = out.witness_world.unwrap();
            prop_assert!(voters.iter().all(|v| &v.world_utility(&w) >= v.threshold.as_ref().unwrap()));
        }

        let scaled: Vec<Voter> = voters
            .iter()
            .map(|v| {
                let k = v.threshold.clone().unwrap() * &scale;
                v.scaled(&scale).unwrap().with_threshold(k)
            })
            .collect();
        let inst2 = TurnoutInstance::new(numbered_universe(n), scaled, h).unwrap();
        let out2 = turnout(&inst2, &limits()).unwrap();
        prop_assert_eq!(out.decision, out2.decision);
        prop_assert_eq!(&out.satisfied, &out2.satisfied);
        prop_assert_eq!(&out.witness, &out2.witness);
    }

    #[test]
    fn gadget_variables_are_fresh(f in formula(3)) {
        // Source names that collide with the gadgets' preferred names.
        let u = VarUniverse::new(["x_star", "y", "z"]).unwrap();
        let a = sat_to_optimistic_threshold::<Rational>(&u, &f).unwrap();
        let b = unsat_to_pessimistic_threshold::<Rational>(&u, &f).unwrap();
        for inst in [&a, &b] {
            let names = inst.theory.universe().names();
            prop_assert_eq!(names.len(), 4);
            prop_assert_eq!(&names[..3], u.names());
            prop_assert!(!u.names().contains(&names[3]));
        }
        let g = CountGadget::<Rational>::build(&u, &f).unwrap();
        prop_assert_eq!((g.y, g.z), (3, 4));
        let names = g.psi.universe().names();
        prop_assert!(!u.names().contains(&names[3]) && !u.names().contains(&names[4]) && names[3] != names[4]);
    }

    #[test]
    fn count_gadget_utilities(n in 1usize..=5, f in formula(5)) {
        let f = f.remap(&|i| i % n);
        let g = CountGadget::<Rational>::build(&numbered_universe(n), &f).unwrap();
        prop_assert!(g.voter.world_utility(&g.extra_world()).is_zero());
        prop_assert!(g.psi_prime.models(&g.extra_world()) && !g.psi.models(&g.extra_world()));
        if common::sat(n, &f) {
            let u = utility_expected(&g.psi, &g.voter, ExpectedMethod::Enumerate, &limits()).unwrap().value;
            prop_assert_eq!(u, q(2, 1));
        }
    }

    #[test]
    fn wsat_inverse_maps_each_model_to_its_weight(
        n in 1usize..=5,
        f in formula(5),
        w in vec((1i64..=12, 1i64..=4), 5),
        maximize in any::<bool>(),
    ) {
        let f = f.remap(&|i| i % n);
        prop_assume!(common::sat(n, &f));
        let weights: Vec<Rational> = w[..n].iter().map(|&(a, d)| q(a, d)).collect();
        let direction = if maximize { WsatDirection::Max } else { WsatDirection::Min };
        let inst = WsatInstance::new(numbered_universe(n), f, weights, direction).unwrap();
        let target = wsat_to_evaluation(&inst, &limits()).unwrap();
        let mut seen: Vec<(Rational, Rational)> = Vec::new();
        for world in enumerate_models(&target.theory, &limits()).unwrap() {
            let u = target.voter.world_utility(&world);
            let weight = target.inverse.weight_from_utility(&u).unwrap();
            prop_assert_eq!(&weight, &inst.weight_of(&world));
            seen.push((u, weight));
        }
        for (u1, w1) in &seen {
            for (u2, w2) in &seen {
                prop_assert_eq!(u1 < u2, w1 < w2);
            }
        }
    }

    #[test]
    fn clause_voters_accept_exactly_satisfying_worlds(
        n in 1usize..=5,
        clauses in vec(vec((0usize..5, any::<bool>()), 0..=4), 1..=5),
    ) {
        let clauses: Vec<Vec<Literal>> = clauses
            .into_iter()
            .map(|c| {
                let mut lits: Vec<Literal> = c.into_iter().map(|(v, positive)| Literal { var: v % n, positive }).collect();
                lits.sort_by_key(|l| (l.var, l.positive));
                lits.dedup();
                lits
            })
            .collect();
        let cnf = Cnf { clauses };
        let inst = cnfsat_to_pessimistic_turnout::<Rational>(&numbered_universe(n), &cnf).unwrap();
        for world in worlds(n) {
            for (clause, v) in cnf.clauses.iter().zip(inst.voters()) {
                let satisfied = clause.iter().any(|l| world.get(l.var) == l.positive);
                prop_assert_eq!(&v.world_utility(&world) >= v.threshold.as_ref().unwrap(), satisfied);
            }
        }
        prop_assert_eq!(turnout(&inst, &limits()).unwrap().decision, common::cnf_sat(n, &cnf));
    }
}
