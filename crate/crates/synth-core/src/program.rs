//! Applied-terminal program trees.
//!
//! A program stores production identifiers rather than operator names; its
//! trace is the preorder sequence of productions (equivalently, the leftmost
//! derivation) and its size is the trace length. Subtrees are reference
//! counted so banked programs reuse banked children without copying.

use crate::grammar::{Grammar, ProdId, Terminal};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq, Hash)]
struct Node {
    production: ProdId,
    children: Vec<Program>,
}

/// An immutable program tree; clones are cheap and share structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program(Arc<Node>);

impl Program {
    pub fn new(production: ProdId, children: Vec<Program>) -> Program {
        Program(Arc::new(Node {
            production,
            children,
        }))
    }

    pub fn leaf(production: ProdId) -> Program {
        Program::new(production, Vec::new())
    }

    pub fn production(&self) -> ProdId {
        self.0.production
    }

    pub fn children(&self) -> &[Program] {
        &self.0.children
    }

    /// Node count of the tree, which equals the length of the trace.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Program::size).sum::<usize>()
    }

    /// The production sequence of the (unique) leftmost derivation.
    pub fn trace(&self) -> Vec<ProdId> {
        let mut out = Vec::with_capacity(self.size());
        self.collect_trace(&mut out);
        out
    }

    fn collect_trace(&self, out: &mut Vec<ProdId>) {
        out.push(self.production());
        for c in self.children() {
            c.collect_trace(out);
        }
    }

    pub fn contains_production(&self, id: ProdId) -> bool {
        self.production() == id || self.children().iter().any(|c| c.contains_production(id))
    }

    /// Number of nodes whose terminal satisfies the predicate.
    pub fn count_nodes(&self, grammar: &Grammar, pred: &dyn Fn(&Terminal) -> bool) -> usize {
        let here = usize::from(pred(&grammar.production(self.production()).terminal));
        here + self
            .children()
            .iter()
            .map(|c| c.count_nodes(grammar, pred))
            .sum::<usize>()
    }

    /// Renders the program as an S-expression using the grammar's terminal
    /// names and SMT-LIB literal syntax.
    pub fn display<'a>(&'a self, grammar: &'a Grammar) -> ProgramDisplay<'a> {
        ProgramDisplay {
            program: self,
            grammar,
        }
    }
}

pub struct ProgramDisplay<'a> {
    program: &'a Program,
    grammar: &'a Grammar,
}

impl fmt::Display for ProgramDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prod = self.grammar.production(self.program.production());
        if self.program.children().is_empty() {
            write!(f, "{}", prod.terminal)
        } else {
            write!(f, "({}", prod.terminal)?;
            for child in self.program.children() {
                write!(f, " {}", child.display(self.grammar))?;
            }
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{GrammarBuilder, ProdId};
    use crate::value::{Sort, Value};

    #[test]
    fn size_trace_and_display() {
        let g = GrammarBuilder::new()
            .nonterminal("S", Sort::Str)
            .variable("arg", Sort::Str)
            .var("S", "arg")
            .literal("S", Value::str("<"))
            .op("S", "str.++", &["S", "S"])
            .build("S")
            .unwrap();
        let arg = Program::leaf(ProdId(0));
        let lit = Program::leaf(ProdId(1));
        let cat = Program::new(ProdId(2), vec![arg.clone(), lit]);
        assert_eq!(cat.size(), 3);
        assert_eq!(cat.trace(), vec![ProdId(2), ProdId(0), ProdId(1)]);
        assert_eq!(cat.display(&g).to_string(), "(str.++ arg \"<\")");
        assert!(cat.contains_production(ProdId(1)));
        assert!(!arg.contains_production(ProdId(1)));
    }
}
