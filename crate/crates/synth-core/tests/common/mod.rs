//! Shared fixtures: the running-example grammar and specs, full-catalog
//! grammars for the three domains, and small helpers.

use std::sync::Arc;
use synth_core::sygus::parse_program;
use synth_core::{Example, Grammar, GrammarBuilder, Pcfg, Program, Sort, Value};

/// The six-production string grammar of the running example, productions
/// in declaration order: arg, "", "<", ">", replace, concat.
pub fn angle_grammar() -> Arc<Grammar> {
    Arc::new(
        GrammarBuilder::new()
            .nonterminal("S", Sort::Str)
            .variable("arg", Sort::Str)
            .var("S", "arg")
            .literal("S", Value::str(""))
            .literal("S", Value::str("<"))
            .literal("S", Value::str(">"))
            .op("S", "str.replace", &["S", "S", "S"])
            .op("S", "str.++", &["S", "S"])
            .build("S")
            .unwrap(),
    )
}

fn ex(input: &str, output: &str) -> Example {
    Example::new(
        [("arg".to_string(), Value::str(input))],
        Value::str(output),
    )
}

/// The three remove-angles examples.
pub fn remove_angles_examples() -> Vec<Example> {
    vec![
        ex("a < 4 and a > 0", "a  4 and a  0"),
        ex("<open and <close>", "open and close"),
        ex("<Change> <string> to <a> number", "Change string to a number"),
    ]
}

/// The two-example simplification.
pub fn remove_angles_short_examples() -> Vec<Example> {
    remove_angles_examples().into_iter().take(2).collect()
}

/// The biased distribution over the angle grammar: literals, the variable
/// and replace at 0.188, concat at 0.059 (normalized).
pub fn biased_pcfg(grammar: &Arc<Grammar>) -> Pcfg {
    Pcfg::from_weights(
        Arc::clone(grammar),
        vec![0.188, 0.188, 0.188, 0.188, 0.188, 0.059],
    )
    .unwrap()
}

pub fn program(grammar: &Grammar, text: &str) -> Program {
    parse_program(grammar, text).unwrap()
}

pub fn replace_2(grammar: &Grammar) -> Program {
    program(
        grammar,
        r#"(str.replace (str.replace arg "<" "") ">" "")"#,
    )
}

pub fn replace_3(grammar: &Grammar) -> Program {
    program(
        grammar,
        r#"(str.replace (str.replace (str.replace arg "<" "") "<" "") ">" "")"#,
    )
}

pub fn replace_6(grammar: &Grammar) -> Program {
    program(
        grammar,
        r#"(str.replace (str.replace (str.replace (str.replace (str.replace (str.replace arg "<" "") "<" "") "<" "") ">" "") ">" "") ">" "")"#,
    )
}

/// The full string-domain grammar: every string, integer and boolean
/// operation of the benchmark suites.
pub fn full_string_grammar() -> Arc<Grammar> {
    Arc::new(
        GrammarBuilder::new()
            .nonterminal("S", Sort::Str)
            .nonterminal("B", Sort::Bool)
            .nonterminal("I", Sort::Int)
            .variable("arg", Sort::Str)
            .var("S", "arg")
            .literal("S", Value::str(""))
            .literal("S", Value::str("-"))
            .op("S", "str.replace", &["S", "S", "S"])
            .op("S", "str.++", &["S", "S"])
            .op("S", "str.substr", &["S", "I", "I"])
            .op("S", "ite", &["B", "S", "S"])
            .op("S", "int.to.str", &["I"])
            .op("S", "str.at", &["S", "I"])
            .literal("B", Value::Bool(true))
            .literal("B", Value::Bool(false))
            .op("B", "=", &["I", "I"])
            .op("B", "str.contains", &["S", "S"])
            .op("B", "str.suffixof", &["S", "S"])
            .op("B", "str.prefixof", &["S", "S"])
            .literal("I", Value::Int(0))
            .literal("I", Value::Int(1))
            .literal("I", Value::Int(3))
            .op("I", "str.to.int", &["S"])
            .op("I", "+", &["I", "I"])
            .op("I", "-", &["I", "I"])
            .op("I", "str.len", &["S"])
            .op("I", "ite", &["B", "I", "I"])
            .op("I", "str.indexof", &["S", "S", "I"])
            .build("S")
            .unwrap(),
    )
}

/// The full bit-vector grammar of the benchmark suites.
pub fn full_bv_grammar() -> Arc<Grammar> {
    Arc::new(
        GrammarBuilder::new()
            .nonterminal("BV", Sort::Bv)
            .nonterminal("B", Sort::Bool)
            .variable("x", Sort::Bv)
            .var("BV", "x")
            .literal("BV", Value::Bv(0))
            .literal("BV", Value::Bv(1))
            .literal("BV", Value::Bv(0x1f))
            .op("BV", "xor", &["BV", "BV"])
            .op("BV", "and", &["BV", "BV"])
            .op("BV", "or", &["BV", "BV"])
            .op("BV", "neg", &["BV"])
            .op("BV", "not", &["BV"])
            .op("BV", "add", &["BV", "BV"])
            .op("BV", "mul", &["BV", "BV"])
            .op("BV", "udiv", &["BV", "BV"])
            .op("BV", "urem", &["BV", "BV"])
            .op("BV", "lshr", &["BV", "BV"])
            .op("BV", "ashr", &["BV", "BV"])
            .op("BV", "shl", &["BV", "BV"])
            .op("BV", "sdiv", &["BV", "BV"])
            .op("BV", "srem", &["BV", "BV"])
            .op("BV", "sub", &["BV", "BV"])
            .op("BV", "ite", &["B", "BV", "BV"])
            .literal("B", Value::Bool(true))
            .literal("B", Value::Bool(false))
            .op("B", "=", &["BV", "BV"])
            .op("B", "ult", &["BV", "BV"])
            .op("B", "ule", &["BV", "BV"])
            .op("B", "slt", &["BV", "BV"])
            .op("B", "sle", &["BV", "BV"])
            .op("B", "ugt", &["BV", "BV"])
            .op("B", "redor", &["BV"])
            .op("B", "and", &["B", "B"])
            .op("B", "or", &["B", "B"])
            .op("B", "not", &["B"])
            .build("BV")
            .unwrap(),
    )
}

/// The boolean circuit grammar.
pub fn full_circuit_grammar() -> Arc<Grammar> {
    Arc::new(
        GrammarBuilder::new()
            .nonterminal("B", Sort::Bool)
            .variable("a", Sort::Bool)
            .variable("b", Sort::Bool)
            .variable("c", Sort::Bool)
            .var("B", "a")
            .var("B", "b")
            .var("B", "c")
            .op("B", "and", &["B", "B"])
            .op("B", "not", &["B"])
            .op("B", "or", &["B", "B"])
            .op("B", "xor", &["B", "B"])
            .build("B")
            .unwrap(),
    )
}
