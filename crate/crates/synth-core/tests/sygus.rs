//! Frontend behavior: parsing, classification, constraint evaluation,
//! verifiers and the counterexample-guided loop.

mod common;

use common::*;
use std::sync::Arc;
use synth_core::sygus::{
    cegis, eval_constraint, exhaustive_verifier, extract_examples, parse_program, parse_sygus,
    sampled_verifier, ConstraintSpec, Logic, Spec, SygusError, SynthStrategy, Verifier,
    VerifyResult,
};
use synth_core::{
    eval, probe, Env, ProbeConfig, SearchBudget, SynthSpec, Value,
};

const REMOVE_ANGLES: &str = r#"
(set-logic SLIA)
(synth-fun f ((arg String)) String
    ((Start String (arg "" "<" ">"
        (str.replace Start Start Start)
        (str.++ Start Start)))))
(constraint (= (f "a < 4 and a > 0") "a  4 and a  0"))
(constraint (= (f "<open and <close>") "open and close"))
(constraint (= (f "<Change> <string> to <a> number") "Change string to a number"))
(check-synth)
"#;

const BV_QUANTIFIED: &str = r#"
(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64)
    ((Start (BitVec 64) (x #x0000000000000001
        (bvand Start Start)
        (bvsub Start Start)))))
(declare-var x (BitVec 64))
(constraint (= (f x) (bvand x (bvsub x #x0000000000000001))))
(check-synth)
"#;

const CIRCUIT_XOR: &str = r#"
(set-logic BV)
(synth-fun f ((a Bool) (b Bool)) Bool
    ((Start Bool (a b
        (and Start Start)
        (or Start Start)
        (not Start)))))
(declare-var a Bool)
(declare-var b Bool)
(constraint (= (f a b) (xor a b)))
(check-synth)
"#;

#[test]
fn parses_the_running_example_as_pbe() {
    let problem = parse_sygus(REMOVE_ANGLES).unwrap();
    assert_eq!(problem.logic, Logic::Slia);
    assert_eq!(problem.grammar.productions().len(), 6);
    assert_eq!(problem.target.params.len(), 1);
    match extract_examples(&problem) {
        Spec::Pbe(examples) => {
            assert_eq!(examples.len(), 3);
            assert_eq!(examples, remove_angles_examples());
        }
        Spec::FirstOrder => panic!("expected examples"),
    }
}

#[test]
fn quantified_bitvector_problem_is_first_order() {
    let problem = parse_sygus(BV_QUANTIFIED).unwrap();
    assert_eq!(problem.logic, Logic::Bv);
    assert_eq!(problem.universals.len(), 1);
    assert_eq!(extract_examples(&problem), Spec::FirstOrder);
}

#[test]
fn circuit_problem_is_classified_by_sorts() {
    let problem = parse_sygus(CIRCUIT_XOR).unwrap();
    assert_eq!(problem.logic, Logic::CircuitBool);
}

#[test]
fn undeclared_nonterminal_is_a_parse_error() {
    let text = r#"
(set-logic SLIA)
(synth-fun f ((arg String)) String
    ((Start String (arg (str.++ Start Other)))))
(check-synth)
"#;
    let err = parse_sygus(text).unwrap_err();
    assert!(matches!(err, SygusError::Unsupported { .. }), "{err}");
}

#[test]
fn unknown_toplevel_form_is_unsupported() {
    let text = "(define-fun g ((x Int)) Int x)";
    match parse_sygus(text).unwrap_err() {
        SygusError::Unsupported { form, .. } => assert!(form.contains("define-fun")),
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn print_parse_round_trip_is_structural_identity() {
    for text in [REMOVE_ANGLES, BV_QUANTIFIED, CIRCUIT_XOR] {
        let problem = parse_sygus(text).unwrap();
        let printed = problem.to_string();
        let reparsed = parse_sygus(&printed).unwrap_or_else(|e| panic!("{printed}\n{e}"));
        assert_eq!(problem, reparsed);
    }
}

#[test]
fn constraint_evaluation_matches_hand_results() {
    let problem = parse_sygus(REMOVE_ANGLES).unwrap();
    let g = &problem.grammar;
    let replace_6 = replace_6(g);
    for c in &problem.constraints {
        assert!(eval_constraint(c, g, &replace_6, &Env::new(), &problem.target).unwrap());
    }
    let replace_2 = replace_2(g);
    let truth: Vec<bool> = problem
        .constraints
        .iter()
        .map(|c| eval_constraint(c, g, &replace_2, &Env::new(), &problem.target).unwrap())
        .collect();
    assert_eq!(truth, vec![true, false, false]);

    // Identity candidate against (= (f x) x) holds for any binding.
    let id_text = r#"
(set-logic SLIA)
(synth-fun f ((arg String)) String ((Start String (arg ""))))
(declare-var x String)
(constraint (= (f x) x))
(check-synth)
"#;
    let id_problem = parse_sygus(id_text).unwrap();
    let id = parse_program(&id_problem.grammar, "arg").unwrap();
    let binding: Env = [("x".to_string(), Value::str("zz"))].into_iter().collect();
    assert!(eval_constraint(
        &id_problem.constraints[0],
        &id_problem.grammar,
        &id,
        &binding,
        &id_problem.target
    )
    .unwrap());
}

/// The sign-style shift identity evaluates cleanly at the all-zeros corner.
#[test]
fn shift_identity_evaluates_at_zero() {
    let text = r#"
(set-logic BV)
(synth-fun f ((x (BitVec 64))) Bool
    ((Start Bool ((bvult Start2 Start2)))
     (Start2 (BitVec 64) (x (bvxor Start2 Start2) (bvneg Start2)))))
(declare-var x (BitVec 64))
(constraint (= (f x) (bvult (bvxor x (bvneg x)) (bvneg x))))
(check-synth)
"#;
    let problem = parse_sygus(text).unwrap();
    let candidate = parse_program(
        &problem.grammar,
        "(bvult (bvxor x (bvneg x)) (bvneg x))",
    )
    .unwrap();
    let binding: Env = [("x".to_string(), Value::Bv(0))].into_iter().collect();
    // At zero: xor(0, neg 0) = 0 and neg 0 = 0, so the comparison is false
    // on both sides and the equality holds.
    assert!(eval_constraint(
        &problem.constraints[0],
        &problem.grammar,
        &candidate,
        &binding,
        &problem.target
    )
    .unwrap());
}

#[test]
fn exhaustive_verifier_accepts_and_refutes() {
    let problem = parse_sygus(CIRCUIT_XOR).unwrap();
    let verifier = exhaustive_verifier(24);
    let xor_equiv = parse_program(
        &problem.grammar,
        "(or (and a (not b)) (and (not a) b))",
    )
    .unwrap();
    assert_eq!(
        verifier.check(&problem, &xor_equiv).unwrap(),
        VerifyResult::Valid
    );

    // (or a b) differs from xor exactly at a = b = true.
    let or_candidate = parse_program(&problem.grammar, "(or a b)").unwrap();
    match verifier.check(&problem, &or_candidate).unwrap() {
        VerifyResult::Counterexample(binding) => {
            assert_eq!(binding.get("a"), Some(&Value::Bool(true)));
            assert_eq!(binding.get("b"), Some(&Value::Bool(true)));
        }
        VerifyResult::Valid => panic!("or is not xor"),
    }

    let tiny = exhaustive_verifier(1);
    assert!(tiny.check(&problem, &or_candidate).is_err());
}

#[test]
fn sampled_verifier_is_deterministic_and_catches_mutants() {
    let text = r#"
(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64)
    ((Start (BitVec 64) (x #x000000000000001f
        (bvor Start Start)
        (bvashr Start Start)
        (bvlshr Start Start)
        (bvneg Start)))))
(declare-var x (BitVec 64))
(constraint (= (f x) (bvor (bvashr x #x000000000000001f) (bvlshr (bvneg x) #x000000000000001f))))
(check-synth)
"#;
    let problem = parse_sygus(text).unwrap();
    let verifier = sampled_verifier(42, 100);
    let exact = parse_program(
        &problem.grammar,
        "(bvor (bvashr x #x000000000000001f) (bvlshr (bvneg x) #x000000000000001f))",
    )
    .unwrap();
    assert_eq!(verifier.check(&problem, &exact).unwrap(), VerifyResult::Valid);

    // Dropping the negation is caught by the corner value 1.
    let mutant = parse_program(
        &problem.grammar,
        "(bvor (bvashr x #x000000000000001f) (bvlshr x #x000000000000001f))",
    )
    .unwrap();
    let first = verifier.check(&problem, &mutant).unwrap();
    let second = verifier.check(&problem, &mutant).unwrap();
    assert_eq!(first, second);
    match first {
        VerifyResult::Counterexample(binding) => {
            let x = binding.get("x").unwrap().clone();
            assert_eq!(x, Value::Bv(1));
            // Confirm the refutation by direct evaluation.
            let lhs = eval(
                &problem.grammar,
                &mutant,
                &[("x".to_string(), x)].into_iter().collect(),
            )
            .unwrap();
            assert_ne!(lhs, Value::Bv(0x1_ffff_ffff));
        }
        VerifyResult::Valid => panic!("mutant accepted"),
    }
}

#[test]
fn cegis_solves_the_circuit_toy_exhaustively() {
    let problem = parse_sygus(CIRCUIT_XOR).unwrap();
    let verifier = exhaustive_verifier(24);
    let mut budget = SearchBudget::unlimited();
    let outcome = cegis(
        &problem,
        SynthStrategy::Guided,
        &ProbeConfig::default(),
        &verifier,
        &mut budget,
    )
    .unwrap();
    let solution = outcome.solution.expect("solved");
    // Correct on all four assignments.
    for a in [false, true] {
        for b in [false, true] {
            let env: Env = [
                ("a".to_string(), Value::Bool(a)),
                ("b".to_string(), Value::Bool(b)),
            ]
            .into_iter()
            .collect();
            assert_eq!(
                eval(&problem.grammar, &solution, &env).unwrap(),
                Value::Bool(a ^ b)
            );
        }
    }
    assert!(outcome.iterations >= 1);
}

#[test]
fn cegis_returns_after_one_iteration_when_first_candidate_verifies() {
    // With x as the only leaf able to match, the first synthesized
    // candidate on the zero seed is already the identity.
    let text = r#"
(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64)
    ((Start (BitVec 64) (x (bvadd Start Start)))))
(declare-var x (BitVec 64))
(constraint (= (f x) x))
(check-synth)
"#;
    let problem = parse_sygus(text).unwrap();
    let verifier = sampled_verifier(7, 50);
    let mut budget = SearchBudget::unlimited();
    let outcome = cegis(
        &problem,
        SynthStrategy::Guided,
        &ProbeConfig::default(),
        &verifier,
        &mut budget,
    )
    .unwrap();
    assert!(outcome.solution.is_some());
    assert_eq!(outcome.iterations, 1);
}

#[test]
fn cegis_solves_clear_rightmost_bit_with_sampling() {
    let problem = parse_sygus(BV_QUANTIFIED).unwrap();
    let verifier = sampled_verifier(11, 10_000);
    let mut budget = SearchBudget::unlimited();
    let outcome = cegis(
        &problem,
        SynthStrategy::Guided,
        &ProbeConfig::default(),
        &verifier,
        &mut budget,
    )
    .unwrap();
    let solution = outcome.solution.expect("solved");
    assert_eq!(solution.size(), 5);
    // Spot-check the synthesized program against the intended function.
    for x in [0u64, 1, 2, 3, 0b1011000, u64::MAX, 1 << 63] {
        let env: Env = [("x".to_string(), Value::Bv(x))].into_iter().collect();
        assert_eq!(
            eval(&problem.grammar, &solution, &env).unwrap(),
            Value::Bv(x & x.wrapping_sub(1))
        );
    }
}

/// A first-order problem whose constraints are all literal equalities
/// behaves exactly like its extracted inductive form.
#[test]
fn literal_equality_first_order_path_matches_pbe_path() {
    let problem = parse_sygus(REMOVE_ANGLES).unwrap();
    let examples = match extract_examples(&problem) {
        Spec::Pbe(e) => e,
        Spec::FirstOrder => unreachable!(),
    };

    let config = ProbeConfig::default();
    let pbe_result = probe(&problem.grammar, &examples, &config).unwrap();

    // Drive the same problem through the constraint-spec machinery with a
    // single empty binding, as the first-order path would.
    let spec = ConstraintSpec::new(&problem, &[Env::new()]);
    assert_eq!(spec.goal_count(), 3);
    assert_eq!(spec.envs().len(), 3);
    let mut budget = SearchBudget::unlimited();
    let fo_result =
        synth_core::probe_with_budget(&problem.grammar, &spec, &config, &mut budget).unwrap();

    let render = |r: &synth_core::ProbeResult| {
        r.solution
            .as_ref()
            .map(|p| p.display(&problem.grammar).to_string())
    };
    assert_eq!(render(&pbe_result), render(&fo_result));
    assert_eq!(pbe_result.candidates, fo_result.candidates);
    assert_eq!(pbe_result.levels, fo_result.levels);
}

#[test]
fn empty_constraint_list_degenerates_to_cheapest_program() {
    let text = r#"
(set-logic SLIA)
(synth-fun f ((arg String)) String ((Start String (arg "" (str.++ Start Start)))))
(check-synth)
"#;
    let problem = parse_sygus(text).unwrap();
    match extract_examples(&problem) {
        Spec::Pbe(examples) => {
            assert!(examples.is_empty());
            let result = probe(&problem.grammar, &examples, &ProbeConfig::default()).unwrap();
            let solution = result.solution.expect("cheapest program");
            assert_eq!(solution.size(), 1);
        }
        Spec::FirstOrder => panic!("expected degenerate inductive spec"),
    }
}

#[test]
fn program_display_parse_round_trip() {
    let g = angle_grammar();
    for text in [
        "arg",
        "\"\"",
        r#"(str.replace (str.replace arg "<" "") ">" "")"#,
        r#"(str.++ arg (str.++ "<" ">"))"#,
    ] {
        let p = parse_program(&g, text).unwrap();
        assert_eq!(p.display(&g).to_string(), text);
    }
    assert!(parse_program(&g, "(str.at arg 0)").is_err());
}

#[test]
fn strict_binding_growth_in_cegis() {
    // The xor circuit needs at least two refinement rounds from the
    // all-zeros seed; iterations imply strictly growing binding sets, and
    // termination itself certifies no binding repeated.
    let problem = parse_sygus(CIRCUIT_XOR).unwrap();
    let verifier = exhaustive_verifier(24);
    let mut budget = SearchBudget::unlimited();
    let outcome = cegis(
        &problem,
        SynthStrategy::Guided,
        &ProbeConfig::default(),
        &verifier,
        &mut budget,
    )
    .unwrap();
    assert!(outcome.iterations >= 2);
    assert!(outcome.solution.is_some());
}
