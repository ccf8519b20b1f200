//! Program evaluation against named input environments.

use crate::grammar::{Grammar, Terminal};
use crate::ops::{apply_operator_ref, MalformedApplication};
use crate::program::Program;
use crate::value::Value;
use std::collections::BTreeMap;

/// A binding from variable names to values.
pub type Env = BTreeMap<String, Value>;

/// One input-output example. Inputs bind every variable terminal of the
/// grammar.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub inputs: Env,
    pub output: Value,
}

impl Example {
    pub fn new(inputs: impl IntoIterator<Item = (String, Value)>, output: Value) -> Example {
        Example {
            inputs: inputs.into_iter().collect(),
            output,
        }
    }
}

/// Evaluates a program under an environment. Deterministic and total for
/// well-sorted programs with fully bound variables; any `Err` indicates an
/// internal bug.
pub fn eval(grammar: &Grammar, program: &Program, env: &Env) -> Result<Value, MalformedApplication> {
    let prod = grammar.production(program.production());
    match &prod.terminal {
        Terminal::Literal(v) => Ok(v.clone()),
        Terminal::Var(name) => env.get(name).cloned().ok_or_else(|| MalformedApplication {
            op: name.clone(),
            expected: "bound variable".to_string(),
            got: "unbound".to_string(),
        }),
        Terminal::Op(sig) => {
            let children: Vec<Value> = program
                .children()
                .iter()
                .map(|c| eval(grammar, c, env))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&Value> = children.iter().collect();
            apply_operator_ref(sig, &refs)
        }
    }
}

/// Evaluates a program on each example's inputs; entry `i` is the output on
/// `examples[i]`.
pub fn eval_on_examples(
    grammar: &Grammar,
    program: &Program,
    examples: &[Example],
) -> Result<Vec<Value>, MalformedApplication> {
    examples
        .iter()
        .map(|ex| eval(grammar, program, &ex.inputs))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{GrammarBuilder, ProdId};
    use crate::value::Sort;

    fn angle_grammar() -> Grammar {
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
            .unwrap()
    }

    // (replace (replace arg "<" "") ">" "")
    fn replace_2() -> Program {
        let arg = Program::leaf(ProdId(0));
        let empty = Program::leaf(ProdId(1));
        let lt = Program::leaf(ProdId(2));
        let gt = Program::leaf(ProdId(3));
        let inner = Program::new(ProdId(4), vec![arg, lt, empty.clone()]);
        Program::new(ProdId(4), vec![inner, gt, empty])
    }

    fn env_of(s: &str) -> Env {
        [("arg".to_string(), Value::str(s))].into_iter().collect()
    }

    #[test]
    fn variable_lookup() {
        let g = angle_grammar();
        let arg = Program::leaf(ProdId(0));
        assert_eq!(eval(&g, &arg, &env_of("xy")).unwrap(), Value::str("xy"));
    }

    #[test]
    fn replace_2_on_first_example() {
        let g = angle_grammar();
        let out = eval(&g, &replace_2(), &env_of("a < 4 and a > 0")).unwrap();
        assert_eq!(out, Value::str("a  4 and a  0"));
    }

    #[test]
    fn empty_example_list_gives_empty_vector() {
        let g = angle_grammar();
        let outs = eval_on_examples(&g, &replace_2(), &[]).unwrap();
        assert!(outs.is_empty());
    }

    #[test]
    fn eval_is_deterministic() {
        let g = angle_grammar();
        let p = replace_2();
        let env = env_of("<a><b>");
        assert_eq!(eval(&g, &p, &env).unwrap(), eval(&g, &p, &env).unwrap());
    }
}
