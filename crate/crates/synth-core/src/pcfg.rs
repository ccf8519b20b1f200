//! Probabilistic grammars and the probability-to-discrete-cost conversion.
//!
//! Rule costs are rounded negative base-2 logs of rule probabilities,
//! clamped to at least one so that a program of `n` nodes always has cost
//! at least `n` and every cost level stays finite. A program's cost is the
//! sum over its trace, its probability the product over its trace.

use crate::grammar::{Grammar, NtId, ProdId};
use crate::program::Program;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

/// Tolerance for the per-nonterminal sum-to-one invariant.
pub const NORMALIZATION_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcfgError {
    #[error("nonterminal {0} has no productions")]
    EmptyNonterminal(String),
    #[error("production {0} has nonpositive probability {1}")]
    NonpositiveProbability(String, f64),
    #[error("probabilities for nonterminal {0} sum to {1}, not 1")]
    NotNormalized(String, f64),
    #[error("probability count {got} does not match production count {expected}")]
    WrongArity { expected: usize, got: usize },
}

/// A grammar plus a per-production probability, normalized per nonterminal.
#[derive(Debug, Clone)]
pub struct Pcfg {
    grammar: Arc<Grammar>,
    probs: Vec<f64>,
}

impl Pcfg {
    /// Wraps explicit probabilities; they must be in (0, 1] and sum to one
    /// per nonterminal within `NORMALIZATION_EPS`.
    pub fn new(grammar: Arc<Grammar>, probs: Vec<f64>) -> Result<Pcfg, PcfgError> {
        if probs.len() != grammar.productions().len() {
            return Err(PcfgError::WrongArity {
                expected: grammar.productions().len(),
                got: probs.len(),
            });
        }
        for (p, prod) in probs.iter().zip(grammar.productions()) {
            if !(*p > 0.0) || *p > 1.0 {
                return Err(PcfgError::NonpositiveProbability(
                    grammar.nonterminal(prod.lhs).name.clone(),
                    *p,
                ));
            }
        }
        for (i, nt) in grammar.nonterminals().iter().enumerate() {
            let sum: f64 = grammar
                .productions_of(NtId(i as u32))
                .map(|p| probs[p.id.index()])
                .sum();
            if grammar.productions_of(NtId(i as u32)).next().is_none() {
                return Err(PcfgError::EmptyNonterminal(nt.name.clone()));
            }
            if (sum - 1.0).abs() > NORMALIZATION_EPS {
                return Err(PcfgError::NotNormalized(nt.name.clone(), sum));
            }
        }
        Ok(Pcfg { grammar, probs })
    }

    /// Normalizes positive weights per nonterminal and wraps the result.
    /// Handy for probability tables quoted to a few decimal places, which
    /// rarely sum to one exactly.
    pub fn from_weights(grammar: Arc<Grammar>, weights: Vec<f64>) -> Result<Pcfg, PcfgError> {
        if weights.len() != grammar.productions().len() {
            return Err(PcfgError::WrongArity {
                expected: grammar.productions().len(),
                got: weights.len(),
            });
        }
        let mut probs = weights;
        for (i, nt) in grammar.nonterminals().iter().enumerate() {
            let ids: Vec<ProdId> = grammar
                .productions_of(NtId(i as u32))
                .map(|p| p.id)
                .collect();
            if ids.is_empty() {
                return Err(PcfgError::EmptyNonterminal(nt.name.clone()));
            }
            let sum: f64 = ids.iter().map(|id| probs[id.index()]).sum();
            for id in &ids {
                let w = probs[id.index()];
                if !(w > 0.0) {
                    return Err(PcfgError::NonpositiveProbability(nt.name.clone(), w));
                }
                probs[id.index()] = w / sum;
            }
        }
        Pcfg::new(grammar, probs)
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    pub fn prob(&self, id: ProdId) -> f64 {
        self.probs[id.index()]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// One line per production with probability, real cost and discrete
    /// cost columns.
    pub fn dump_table(&self) -> String {
        let mut out = String::new();
        for prod in self.grammar.productions() {
            let p = self.prob(prod.id);
            let rcost = -p.log2();
            let _ = writeln!(
                out,
                "{} -> {}{}  p={:.4}  rcost={:.2}  cost={}",
                self.grammar.nonterminal(prod.lhs).name,
                prod.terminal,
                if prod.is_leaf() {
                    String::new()
                } else {
                    let args: Vec<&str> = prod
                        .rhs
                        .iter()
                        .map(|nt| self.grammar.nonterminal(*nt).name.as_str())
                        .collect();
                    format!("({})", args.join(" "))
                },
                p,
                rcost,
                rule_cost(p).unwrap(),
            );
        }
        out
    }
}

/// The uniform distribution: every production of a nonterminal with `k`
/// alternatives gets probability `1/k`.
pub fn uniform_pcfg(grammar: &Arc<Grammar>) -> Result<Pcfg, PcfgError> {
    let mut probs = vec![0.0; grammar.productions().len()];
    for (i, nt) in grammar.nonterminals().iter().enumerate() {
        let ids: Vec<ProdId> = grammar
            .productions_of(NtId(i as u32))
            .map(|p| p.id)
            .collect();
        if ids.is_empty() {
            return Err(PcfgError::EmptyNonterminal(nt.name.clone()));
        }
        for id in &ids {
            probs[id.index()] = 1.0 / ids.len() as f64;
        }
    }
    Pcfg::new(Arc::clone(grammar), probs)
}

/// Discrete cost of a rule probability: `round(-log2 p)` (half away from
/// zero), clamped to at least 1.
pub fn rule_cost(p: f64) -> Result<u64, PcfgError> {
    if !(p > 0.0) {
        return Err(PcfgError::NonpositiveProbability("<rule>".to_string(), p));
    }
    let rcost = -p.log2();
    let rounded = (rcost + 0.5).floor();
    Ok(if rounded < 1.0 { 1 } else { rounded as u64 })
}

/// Integer cost per production, derived from a PCFG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    costs: Vec<u64>,
    max_rule_cost: u64,
}

impl CostModel {
    pub fn from_costs(costs: Vec<u64>) -> CostModel {
        assert!(costs.iter().all(|c| *c >= 1), "rule costs must be positive");
        let max_rule_cost = costs.iter().copied().max().unwrap_or(1);
        CostModel {
            costs,
            max_rule_cost,
        }
    }

    /// The all-ones model; program cost then equals program size, which is
    /// the unguided size-ordered baseline.
    pub fn unit(grammar: &Grammar) -> CostModel {
        CostModel::from_costs(vec![1; grammar.productions().len()])
    }

    pub fn cost(&self, id: ProdId) -> u64 {
        self.costs[id.index()]
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    pub fn max_rule_cost(&self) -> u64 {
        self.max_rule_cost
    }
}

/// Applies `rule_cost` to every production of a PCFG.
pub fn cost_model(pcfg: &Pcfg) -> Result<CostModel, PcfgError> {
    let costs = pcfg
        .probs()
        .iter()
        .map(|p| rule_cost(*p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CostModel::from_costs(costs))
}

/// Sum of rule costs over the program's trace.
pub fn program_cost(program: &Program, cm: &CostModel) -> u64 {
    cm.cost(program.production())
        + program
            .children()
            .iter()
            .map(|c| program_cost(c, cm))
            .sum::<u64>()
}

/// Product of rule probabilities over the program's trace.
pub fn program_probability(program: &Program, pcfg: &Pcfg) -> f64 {
    pcfg.prob(program.production())
        * program
            .children()
            .iter()
            .map(|c| program_probability(c, pcfg))
            .product::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::GrammarBuilder;
    use crate::value::{Sort, Value};

    fn angle_grammar() -> Arc<Grammar> {
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

    #[test]
    fn uniform_assigns_reciprocal_of_alternative_count() {
        let g = angle_grammar();
        let pcfg = uniform_pcfg(&g).unwrap();
        for p in pcfg.probs() {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
        }

        let single = Arc::new(
            GrammarBuilder::new()
                .nonterminal("S", Sort::Int)
                .literal("S", Value::Int(1))
                .build("S")
                .unwrap(),
        );
        assert_eq!(uniform_pcfg(&single).unwrap().probs(), &[1.0]);

        let two = Arc::new(
            GrammarBuilder::new()
                .nonterminal("S", Sort::Int)
                .literal("S", Value::Int(1))
                .literal("S", Value::Int(2))
                .build("S")
                .unwrap(),
        );
        assert_eq!(uniform_pcfg(&two).unwrap().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn empty_nonterminal_is_rejected() {
        let g = Arc::new(
            GrammarBuilder::new()
                .nonterminal("S", Sort::Int)
                .nonterminal("T", Sort::Int)
                .literal("S", Value::Int(1))
                .build("S")
                .unwrap(),
        );
        assert!(matches!(
            uniform_pcfg(&g),
            Err(PcfgError::EmptyNonterminal(_))
        ));
    }

    #[test]
    fn rule_cost_golden_values() {
        assert_eq!(rule_cost(0.188).unwrap(), 2);
        assert_eq!(rule_cost(0.059).unwrap(), 4);
        assert_eq!(rule_cost(1.0 / 6.0).unwrap(), 3);
        assert_eq!(rule_cost(0.5).unwrap(), 1);
        assert_eq!(rule_cost(1.0).unwrap(), 1);
        assert_eq!(rule_cost(0.9).unwrap(), 1);
        assert!(rule_cost(0.0).is_err());
        assert!(rule_cost(-0.2).is_err());
    }

    #[test]
    fn biased_model_costs_and_program_cost() {
        let g = angle_grammar();
        // Four literals/variable and replace at 0.188, concat at 0.059.
        let pcfg =
            Pcfg::from_weights(Arc::clone(&g), vec![0.188, 0.188, 0.188, 0.188, 0.188, 0.059])
                .unwrap();
        let cm = cost_model(&pcfg).unwrap();
        assert_eq!(cm.costs(), &[2, 2, 2, 2, 2, 4]);
        assert_eq!(cm.max_rule_cost(), 4);

        // (concat arg "<") = 4 + 2 + 2 = 8
        let p = Program::new(
            ProdId(5),
            vec![Program::leaf(ProdId(0)), Program::leaf(ProdId(2))],
        );
        assert_eq!(program_cost(&p, &cm), 8);

        let unit = CostModel::unit(&g);
        assert_eq!(unit.max_rule_cost(), 1);
        assert_eq!(program_cost(&p, &unit), 3);
    }

    #[test]
    fn probability_is_product_over_trace() {
        let g = angle_grammar();
        let pcfg =
            Pcfg::from_weights(Arc::clone(&g), vec![0.188, 0.188, 0.188, 0.188, 0.188, 0.059])
                .unwrap();
        let arg = Program::leaf(ProdId(0));
        let p = Program::new(ProdId(5), vec![arg.clone(), arg.clone()]);
        let got = program_probability(&p, &pcfg);
        let norm = 5.0 * 0.188 + 0.059;
        let expected = (0.059 / norm) * (0.188 / norm) * (0.188 / norm);
        assert!((got - expected).abs() < 1e-12);
        assert!((program_probability(&arg, &pcfg) - 0.188 / norm).abs() < 1e-12);
    }

    #[test]
    fn dump_lists_one_line_per_production() {
        let g = angle_grammar();
        let pcfg = uniform_pcfg(&g).unwrap();
        let dump = pcfg.dump_table();
        assert_eq!(dump.lines().count(), 6);
        assert!(dump.contains("str.replace"));
        assert!(dump.contains("cost=3"));
    }
}
