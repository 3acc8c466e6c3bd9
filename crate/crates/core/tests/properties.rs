use proptest::prelude::*;

use pegmachine_core::closures::{pel_complement, pel_intersection, pel_union};
use pegmachine_core::cooksim::{run_linear, work_bound};
use pegmachine_core::gen::{random_cnf_grammar, random_grammar, rng, GenConfig};
use pegmachine_core::peg::{
    accepts, check_well_formed, desugar, interpret_naive, parse_grammar_text, to_cnf, Grammar, ParseOutcome,
    DEFAULT_BUDGET,
};
use pegmachine_core::pppda::{
    check_normal_form, default_step_limit, normalize, parse_machine_text, run_direct, run_traced, EventKind, Machine,
};
use pegmachine_core::translate::{compile, dppda_to_peg};

fn cnf(seed: u64) -> Grammar {
    random_cnf_grammar(&mut rng(seed), &GenConfig::default()).into_grammar()
}

fn general(seed: u64) -> Grammar {
    random_grammar(&mut rng(seed), &GenConfig::default())
}

fn word() -> impl Strategy<Value = Vec<char>> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b']), 0..7)
}

fn words() -> impl Strategy<Value = Vec<Vec<char>>> {
    prop::collection::vec(word(), 1..12)
}

fn direct(m: &Machine, w: &[char]) -> bool {
    run_direct(m, w, default_step_limit(m, w.len())).unwrap().outcome.accepted()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn naive_and_packrat_agree(seed in any::<u64>(), ws in words()) {
        let g = general(seed);
        for w in &ws {
            let naive = interpret_naive(&g, g.rule(g.axiom()), w, 0, DEFAULT_BUDGET);
            prop_assert_eq!(naive == ParseOutcome::Consumed(w.len()), accepts(&g, w));
        }
    }

    #[test]
    fn desugaring_and_normal_form_keep_the_language(seed in any::<u64>(), ws in words()) {
        let g = general(seed);
        let d = desugar(&g);
        prop_assert!(d.is_core());
        prop_assert!(check_well_formed(&d).well_formed);
        let c = to_cnf(&d).unwrap();
        for w in &ws {
            prop_assert_eq!(accepts(&g, w), accepts(&d, w));
            prop_assert_eq!(accepts(&g, w), accepts(c.grammar(), w));
        }
    }

    #[test]
    fn compiled_machines_agree_with_packrat(seed in any::<u64>(), ws in words()) {
        let g = cnf(seed);
        let m = compile(&g).unwrap();
        for w in &ws {
            let expected = accepts(&g, w);
            prop_assert_eq!(direct(&m, w), expected);
            prop_assert_eq!(run_linear(&m, w).unwrap().outcome.accepted(), expected);
        }
    }

    #[test]
    fn linear_simulation_stays_within_its_work_bound(seed in any::<u64>(), w in word()) {
        let m = compile(&general(seed)).unwrap();
        let r = run_linear(&m, &w).unwrap();
        prop_assert!(r.ops <= work_bound(&m, w.len()), "{} > {}", r.ops, work_bound(&m, w.len()));
    }

    #[test]
    fn normalization_and_extraction_keep_the_language(seed in any::<u64>(), ws in words()) {
        let m = compile(&cnf(seed)).unwrap();
        let n = normalize(&m);
        prop_assert!(check_normal_form(&n).is_ok());
        let h = dppda_to_peg(&n).unwrap();
        for w in &ws {
            let expected = direct(&m, w);
            prop_assert_eq!(direct(&n, w), expected);
            prop_assert_eq!(accepts(&h, w), expected);
        }
    }

    /// Every pushed entry records the head position right after its push,
    /// and the stack only empties on the last move.
    #[test]
    fn pointer_discipline(seed in any::<u64>(), w in word()) {
        let m = compile(&cnf(seed)).unwrap();
        let (report, events) = run_traced(&m, &w, default_step_limit(&m, w.len())).unwrap();
        for (i, e) in events.iter().enumerate() {
            if e.kind == EventKind::Push {
                prop_assert_eq!(&e.after.stack[..e.before.stack.len()], &e.before.stack[..]);
                for &(_, origin) in &e.after.stack[e.before.stack.len()..] {
                    prop_assert_eq!(origin, e.after.head);
                }
            }
            if e.after.stack.is_empty() {
                prop_assert_eq!(i + 1, events.len());
                prop_assert!(report.outcome.accepted());
            }
        }
    }

    #[test]
    fn boolean_combinators(s1 in any::<u64>(), s2 in any::<u64>(), ws in words()) {
        let (g1, g2) = (general(s1), general(s2));
        let not1 = pel_complement(&g1);
        let or = pel_union(&g1, &g2).unwrap();
        let and = pel_intersection(&g1, &g2).unwrap();
        for w in &ws {
            let (a, b) = (accepts(&g1, w), accepts(&g2, w));
            prop_assert_eq!(accepts(&not1, w), !a);
            prop_assert_eq!(accepts(&or, w), a || b);
            prop_assert_eq!(accepts(&and, w), a && b);
        }
    }

    #[test]
    fn grammar_text_round_trips(seed in any::<u64>()) {
        let g = general(seed);
        prop_assert_eq!(parse_grammar_text(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn machine_text_round_trips(seed in any::<u64>()) {
        let m = compile(&cnf(seed)).unwrap();
        prop_assert_eq!(parse_machine_text(&m.to_string()).unwrap(), m);
    }
}
