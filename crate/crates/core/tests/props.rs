mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use polyreason::decomposer::{decompose, DecomposerBackend};
use polyreason::engines::lp::{derive, derive_with_order};
use polyreason::engines::{solve_csp, solve_smt, EngineLimits};
use polyreason::formalizer::template_program;
use polyreason::harness::{Dataset, Instance};
use polyreason::logiclang::smt::{format_rational, SmtTerm};
use polyreason::logiclang::{parse_csp, parse_smt, FormalProgram, Language};
use polyreason::router::{build_plan, validate_plan, RoutingPlan};
use polyreason::types::{AnswerOption, Components, DecomposedInput, ProblemId, ReasoningType, SolverVerdict, SubProblem};

const OPS: [&str; 6] = ["<", "<=", ">", ">=", "=", "!="];

fn csp_model() -> impl Strategy<Value = String> {
    (2usize..=4).prop_flat_map(|n| {
        let binary = prop::collection::vec((0..n, 0..n, 0..6usize, -1i64..=1), 0..4);
        let unary = prop::collection::vec((0..n, 0..6usize, 1..=n as i64), 0..2);
        (Just(n), binary, unary, any::<bool>()).prop_map(|(n, binary, unary, alldiff)| {
            let members: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
            let mut s = format!("enum O = {{{}}};\narray[O] of var 1..{n}: pos;\n", members.join(", "));
            if alldiff {
                s.push_str("constraint all_different(pos);\n");
            }
            for (a, b, op, off) in binary {
                let lhs = match off {
                    0 => format!("pos[o{a}]"),
                    k if k > 0 => format!("pos[o{a}] + {k}"),
                    k => format!("pos[o{a}] - {}", -k),
                };
                s.push_str(&format!("constraint {lhs} {} pos[o{b}];\n", OPS[op]));
            }
            for (a, op, k) in unary {
                s.push_str(&format!("constraint pos[o{a}] {} {k};\n", OPS[op]));
            }
            s.push_str("solve satisfy;\n");
            s
        })
    })
}

fn smt_formula() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("b0".to_string()),
        Just("b1".to_string()),
        (0..4usize, -3i64..=3).prop_map(|(op, k)| format!("({} x {})", [">", ">=", "<", "<="][op], lit(k))),
        (0..4usize, -3i64..=3).prop_map(|(op, k)| format!("({} y {})", [">", ">=", "<", "<="][op], lit(k))),
        (-3i64..=3).prop_map(|k| format!("(= x {})", lit(k))),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| format!("(not {a})")),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| format!("(and {})", v.join(" "))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| format!("(or {})", v.join(" "))),
            (inner.clone(), inner).prop_map(|(a, b)| format!("(=> {a} {b})")),
        ]
    })
}

fn lit(k: i64) -> String {
    if k < 0 {
        format!("(- {})", -k)
    } else {
        k.to_string()
    }
}

fn smt_script() -> impl Strategy<Value = String> {
    prop::collection::vec(smt_formula(), 1..4).prop_map(|asserts| {
        let mut s = "(declare-const b0 Bool)\n(declare-const b1 Bool)\n(declare-const x Int)\n(declare-const y Real)\n".to_string();
        for a in asserts {
            s.push_str(&format!("(assert {a})\n"));
        }
        s.push_str("(check-sat)\n");
        s
    })
}

fn input_of(types: &[ReasoningType]) -> DecomposedInput {
    DecomposedInput {
        sub_problems: types
            .iter()
            .enumerate()
            .map(|(i, &ty)| SubProblem {
                problem_id: ProblemId::new(i + 1),
                reasoning_type: ty,
                components: Components::for_type(ty, "a".into(), "b".into()),
                options: AnswerOption::label_all(&["True", "False"]),
                type_alias: None,
            })
            .collect(),
        overall_goal: "goal".into(),
    }
}

fn reasoning_type() -> impl Strategy<Value = ReasoningType> {
    prop::sample::select(ReasoningType::ALL.to_vec())
}

fn dataset() -> impl Strategy<Value = Dataset> {
    prop_oneof![
        (1usize..=6).prop_map(|hops| Dataset::LpChain { hops }),
        Just(Dataset::LpOpen),
        Just(Dataset::Fol),
        prop::sample::select(vec![3usize, 5, 7]).prop_map(|objects| Dataset::Csp { objects }),
        Just(Dataset::Smt),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csp_engine_matches_brute_force(text in csp_model()) {
        let m = parse_csp(&text).unwrap();
        let expected = common::csp_brute_force(&m);
        let SolverVerdict::Solutions { assignments, complete: true } = solve_csp(&m, &EngineLimits::default()) else {
            panic!("incomplete enumeration for\n{text}");
        };
        let got: BTreeSet<common::CspSolution> = assignments.iter().map(|a| { let mut v = a.0.clone(); v.sort(); v }).collect();
        prop_assert_eq!(got.len(), assignments.len());
        prop_assert_eq!(got, expected, "{}", text);
    }

    #[test]
    fn csp_solutions_are_sorted(text in csp_model()) {
        let m = parse_csp(&text).unwrap();
        if let SolverVerdict::Solutions { assignments, .. } = solve_csp(&m, &EngineLimits::default()) {
            let values: Vec<Vec<i64>> = assignments.iter().map(|a| a.0.iter().map(|(_, v)| *v).collect()).collect();
            prop_assert!(values.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn smt_engine_matches_brute_force(text in smt_script()) {
        let s = parse_smt(&text).unwrap();
        let expected = common::smt_brute_force(&s);
        let got = solve_smt(&s, &EngineLimits::default());
        prop_assert_eq!(got, if expected { SolverVerdict::Sat } else { SolverVerdict::Unsat }, "{}", text);
    }

    #[test]
    fn smt_scripts_round_trip(text in smt_script()) {
        let s = parse_smt(&text).unwrap();
        prop_assert_eq!(parse_smt(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rationals_print_and_parse(n in -1_000_000i128..1_000_000, d in 1i128..1000) {
        let r = common::Rational::new(n, d);
        let text = format!("(declare-const y Real)\n(assert (= y {}))\n(check-sat)\n", format_rational(&r));
        let s = parse_smt(&text).unwrap();
        let SmtTerm::Cmp(_, _, rhs) = &s.assertions[0] else { panic!("{text}") };
        prop_assert_eq!(&**rhs, &SmtTerm::Num(r));
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,200}", lang in prop::sample::select(Language::ALL.to_vec())) {
        if let Err(d) = lang.parse(&text) {
            prop_assert!(!d.0.is_empty());
        }
    }

    #[test]
    fn plans_validate_and_round_trip(types in prop::collection::vec(reasoning_type(), 1..10)) {
        let input = input_of(&types);
        let plan = build_plan(&input, |_| true, false).unwrap();
        prop_assert!(validate_plan(&plan).is_ok());
        let back = RoutingPlan::from_wire(&plan.to_wire_string()).unwrap();
        prop_assert_eq!(back, plan);
    }

    #[test]
    fn missing_solvers_fail_without_fallback(types in prop::collection::vec(reasoning_type(), 1..6), gone in reasoning_type()) {
        let input = input_of(&types);
        let result = build_plan(&input, |t| t != gone, false);
        prop_assert_eq!(result.is_ok(), !types.contains(&gone));
    }

    #[test]
    fn problem_ids_round_trip(i in 1usize..100_000) {
        let id = ProblemId::new(i);
        prop_assert_eq!(ProblemId::parse(id.as_str()), Some(id.clone()));
        prop_assert_eq!(id.index(), i);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_fixpoint_ignores_rule_order(seed in any::<u64>(), order_seed in any::<u64>()) {
        let inst = &Dataset::LpOpen.generate(1, seed).unwrap()[0];
        let FormalProgram::Lp(p) = inst.program().unwrap() else { panic!("not LP") };
        let limits = EngineLimits::default();
        let mut order: Vec<usize> = (0..p.rules.len()).collect();
        use rand::{seq::SliceRandom, SeedableRng};
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(order_seed));
        prop_assert_eq!(derive_with_order(&p, &limits, &order).fixpoint(), derive(&p, &limits).fixpoint());
    }

    #[test]
    fn rendered_text_formalizes_back(d in dataset(), seed in any::<u64>()) {
        let inst: Instance = d.generate(1, seed).unwrap().remove(0);
        let input = decompose(&inst.nl_text, &DecomposerBackend::default()).unwrap().input;
        prop_assert_eq!(input.sub_problems.len(), 1);
        let q = &input.sub_problems[0];
        prop_assert_eq!(q.reasoning_type, inst.gold_type);
        prop_assert_eq!(template_program(q).unwrap(), inst.program().unwrap());
    }

    #[test]
    fn generation_is_deterministic(d in dataset(), seed in any::<u64>()) {
        prop_assert_eq!(d.generate(2, seed).unwrap(), d.generate(2, seed).unwrap());
    }
}
