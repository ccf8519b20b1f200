//! Randomized problems and a brute-force program generator for stress
//! tests. Nothing here touches the bank or cache machinery, so the
//! generator doubles as an independent oracle for completeness checks.

use crate::eval::{eval, Env, Example};
use crate::grammar::{Grammar, GrammarBuilder, NtId};
use crate::program::Program;
use crate::value::{Sort, Value};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// All programs of each nonterminal, stratified by node count:
/// `result[nt][size]` lists every program of exactly that size, without any
/// pruning. Plain size recursion over the productions.
pub fn all_programs_up_to_size(grammar: &Grammar, max_size: usize) -> Vec<Vec<Vec<Program>>> {
    let n_nts = grammar.nonterminals().len();
    let mut table: Vec<Vec<Vec<Program>>> = vec![vec![Vec::new(); max_size + 1]; n_nts];
    for size in 1..=max_size {
        for prod in grammar.productions() {
            let k = prod.arity();
            if k == 0 {
                if size == 1 {
                    table[prod.lhs.index()][1].push(Program::leaf(prod.id));
                }
                continue;
            }
            if size < k + 1 {
                continue;
            }
            let mut split = Vec::with_capacity(k);
            fill_splits(
                &mut table,
                prod.lhs.index(),
                size,
                prod.id,
                &prod.rhs,
                size - 1,
                &mut split,
            );
        }
    }
    table
}

#[allow(clippy::too_many_arguments)]
fn fill_splits(
    table: &mut Vec<Vec<Vec<Program>>>,
    lhs: usize,
    size: usize,
    prod: crate::grammar::ProdId,
    rhs: &[NtId],
    remaining: usize,
    chosen: &mut Vec<Program>,
) {
    let slot = chosen.len();
    if slot == rhs.len() {
        debug_assert_eq!(remaining, 0);
        table[lhs][size].push(Program::new(prod, chosen.clone()));
        return;
    }
    let last = slot + 1 == rhs.len();
    let lo = if last { remaining } else { 1 };
    let hi = if last {
        remaining
    } else {
        remaining.saturating_sub(rhs.len() - slot - 1)
    };
    for this_size in lo..=hi {
        if this_size == 0 {
            continue;
        }
        let options = table[rhs[slot].index()][this_size].clone();
        for p in options {
            chosen.push(p);
            fill_splits(table, lhs, size, prod, rhs, remaining - this_size, chosen);
            chosen.pop();
        }
    }
}

/// A random well-sorted program of the nonterminal, leaf-biased so trees
/// stay small; `budget` bounds the node count.
pub fn random_program(
    grammar: &Grammar,
    nt: NtId,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Program {
    let choices: Vec<_> = grammar
        .productions_of(nt)
        .filter(|p| p.is_leaf() || p.arity() + 1 <= budget)
        .collect();
    let leaves: Vec<_> = choices.iter().filter(|p| p.is_leaf()).collect();
    let prod = if leaves.is_empty() || (choices.len() > leaves.len() && rng.gen_bool(0.55)) {
        let composites: Vec<_> = choices.iter().filter(|p| !p.is_leaf()).collect();
        if composites.is_empty() {
            *leaves[rng.gen_range(0..leaves.len())]
        } else {
            *composites[rng.gen_range(0..composites.len())]
        }
    } else {
        *leaves[rng.gen_range(0..leaves.len())]
    };
    if prod.is_leaf() {
        return Program::leaf(prod.id);
    }
    let k = prod.arity();
    let child_budget = (budget - 1) / k;
    let children = prod
        .rhs
        .iter()
        .map(|child| random_program(grammar, *child, child_budget.max(1), rng))
        .collect();
    Program::new(prod.id, children)
}

/// A random value of the sort, drawn from a small alphabet for strings.
pub fn random_value(sort: Sort, rng: &mut ChaCha8Rng) -> Value {
    match sort {
        Sort::Str => {
            let alphabet: Vec<char> = "ab<> -01".chars().collect();
            let len = rng.gen_range(0..9);
            Value::Str(
                (0..len)
                    .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                    .collect(),
            )
        }
        Sort::Int => Value::Int(rng.gen_range(-4..16)),
        Sort::Bool => Value::Bool(rng.gen()),
        Sort::Bv => Value::Bv(if rng.gen_bool(0.5) {
            rng.gen_range(0..16)
        } else {
            rng.gen()
        }),
    }
}

/// A randomized inductive problem: a grammar, a hidden target drawn from
/// it, and examples produced by evaluating the target on random inputs.
#[derive(Debug)]
pub struct MiniProblem {
    pub grammar: Arc<Grammar>,
    pub target: Program,
    pub examples: Vec<Example>,
}

/// Generates a small single-domain problem; the domain cycles with the
/// seed so a batch covers strings, bit vectors and booleans.
pub fn mini_problem(seed: u64) -> MiniProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grammar = Arc::new(match seed % 3 {
        0 => string_grammar(&mut rng),
        1 => bv_grammar(&mut rng),
        _ => bool_grammar(&mut rng),
    });
    let target = random_program(&grammar, grammar.start(), 6, &mut rng);
    let n_examples = rng.gen_range(2..=4);
    let examples = (0..n_examples)
        .map(|_| {
            let inputs: Env = grammar
                .variables()
                .iter()
                .map(|(name, sort)| (name.clone(), random_value(*sort, &mut rng)))
                .collect();
            let output = eval(&grammar, &target, &inputs).expect("total evaluation");
            Example { inputs, output }
        })
        .collect();
    MiniProblem {
        grammar,
        target,
        examples,
    }
}

fn string_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let mut b = GrammarBuilder::new()
        .nonterminal("S", Sort::Str)
        .variable("arg", Sort::Str)
        .var("S", "arg")
        .literal("S", Value::str(""));
    for lit in ["<", ">", "a", "-"] {
        if rng.gen_bool(0.6) {
            b = b.literal("S", Value::str(lit));
        }
    }
    b = b.op("S", "str.++", &["S", "S"]);
    if rng.gen_bool(0.7) {
        b = b.op("S", "str.replace", &["S", "S", "S"]);
    }
    if rng.gen_bool(0.4) {
        b = b
            .nonterminal("I", Sort::Int)
            .literal("I", Value::Int(0))
            .literal("I", Value::Int(1))
            .literal("I", Value::Int(2))
            .op("I", "str.len", &["S"])
            .op("S", "str.substr", &["S", "I", "I"])
            .op("S", "str.at", &["S", "I"]);
    }
    b.build("S").expect("string grammar")
}

fn bv_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let mut b = GrammarBuilder::new()
        .nonterminal("B", Sort::Bv)
        .variable("x", Sort::Bv)
        .var("B", "x")
        .literal("B", Value::Bv(0))
        .literal("B", Value::Bv(1));
    let ops = [
        "bvand", "bvor", "bvxor", "bvadd", "bvsub", "bvmul", "bvudiv", "bvurem", "bvshl",
        "bvlshr", "bvashr",
    ];
    let mut any = false;
    for op in ops {
        if rng.gen_bool(0.4) {
            b = b.op("B", op, &["B", "B"]);
            any = true;
        }
    }
    if !any {
        b = b.op("B", "bvadd", &["B", "B"]);
    }
    if rng.gen_bool(0.5) {
        b = b.op("B", "bvnot", &["B"]);
    }
    if rng.gen_bool(0.5) {
        b = b.op("B", "bvneg", &["B"]);
    }
    b.build("B").expect("bv grammar")
}

fn bool_grammar(rng: &mut ChaCha8Rng) -> Grammar {
    let mut b = GrammarBuilder::new()
        .nonterminal("B", Sort::Bool)
        .variable("p", Sort::Bool)
        .variable("q", Sort::Bool)
        .var("B", "p")
        .var("B", "q")
        .op("B", "and", &["B", "B"])
        .op("B", "or", &["B", "B"]);
    if rng.gen_bool(0.6) {
        b = b.op("B", "xor", &["B", "B"]);
    }
    if rng.gen_bool(0.8) {
        b = b.op("B", "not", &["B"]);
    }
    b.build("B").expect("bool grammar")
}
