//! Height-ordered bottom-up enumeration, the classic baseline.
//!
//! Iteration `n` builds every application whose operands come from heights
//! up to `n - 1` with at least one operand of height exactly `n - 1`;
//! observational equivalence is applied exactly as in the cost-ordered
//! search. The bank is indexed by height instead of cost level.

use super::bank::{Bank, BankEntry, EvalCache};
use super::SynthSpec;
use crate::budget::SearchBudget;
use crate::grammar::{Grammar, Terminal};
use crate::program::Program;
use crate::value::Value;
use log::debug;
use std::sync::Arc;

#[derive(Debug)]
pub struct HeightSearchResult {
    pub solution: Option<Program>,
    /// Programs banked at each height, starting at height 0.
    pub banked_per_height: Vec<usize>,
    /// Tuples constructed at each height, including pruned ones.
    pub yielded_per_height: Vec<usize>,
    /// True when the budget ran out before the search finished.
    pub budget_exhausted: bool,
}

struct HeightRun<'a> {
    grammar: &'a Grammar,
    spec: &'a dyn SynthSpec,
    bank: Bank,
    cache: EvalCache,
    banked_per_height: Vec<usize>,
    yielded_per_height: Vec<usize>,
}

enum StepOutcome {
    Solved(Program),
    Banked,
    Pruned,
    Budget,
}

impl HeightRun<'_> {
    fn consider(
        &mut self,
        height: u64,
        program: Program,
        outputs: Vec<Value>,
        budget: &mut SearchBudget,
    ) -> StepOutcome {
        if !budget.note_yield() {
            return StepOutcome::Budget;
        }
        *self.yielded_per_height.last_mut().expect("level recorded") += 1;
        let nt = self.grammar.production(program.production()).lhs;
        let sat = self.spec.satisfied(&outputs);
        if nt == self.grammar.start() && sat.is_full() {
            if !budget.spend_candidate() {
                return StepOutcome::Budget;
            }
            return StepOutcome::Solved(program);
        }
        if self.cache.contains(nt, &outputs) {
            return StepOutcome::Pruned;
        }
        if !budget.spend_candidate() {
            return StepOutcome::Budget;
        }
        let outputs = Arc::new(outputs);
        self.cache.insert(nt, Arc::clone(&outputs));
        self.bank.push(height, nt, BankEntry { program, outputs });
        *self.banked_per_height.last_mut().expect("level recorded") += 1;
        StepOutcome::Banked
    }
}

/// Runs height-ordered search until a solution, the height bound, budget
/// exhaustion, or a height that banks nothing new (after which no taller
/// program exists).
pub fn height_search(
    grammar: &Grammar,
    spec: &dyn SynthSpec,
    max_height: Option<u64>,
    budget: &mut SearchBudget,
) -> HeightSearchResult {
    let mut run = HeightRun {
        grammar,
        spec,
        bank: Bank::new(grammar),
        cache: EvalCache::new(grammar),
        banked_per_height: Vec::new(),
        yielded_per_height: Vec::new(),
    };
    let mut height = 0u64;
    loop {
        if max_height.is_some_and(|m| height > m) || budget.deadline_passed() {
            return HeightSearchResult {
                solution: None,
                banked_per_height: run.banked_per_height,
                yielded_per_height: run.yielded_per_height,
                budget_exhausted: budget.deadline_passed(),
            };
        }
        budget.levels += 1;
        run.bank.ensure_level(height);
        run.banked_per_height.push(0);
        run.yielded_per_height.push(0);
        let outcome = build_height(&mut run, height, budget);
        match outcome {
            Some(StepOutcome::Solved(p)) => {
                return HeightSearchResult {
                    solution: Some(p),
                    banked_per_height: run.banked_per_height,
                    yielded_per_height: run.yielded_per_height,
                    budget_exhausted: false,
                }
            }
            Some(StepOutcome::Budget) => {
                return HeightSearchResult {
                    solution: None,
                    banked_per_height: run.banked_per_height,
                    yielded_per_height: run.yielded_per_height,
                    budget_exhausted: true,
                }
            }
            _ => {}
        }
        let banked = *run.banked_per_height.last().expect("level recorded");
        debug!("height {height}: banked {banked}");
        if banked == 0 {
            // No new behavior at this height; taller programs need an
            // operand of this height, so the space is exhausted.
            return HeightSearchResult {
                solution: None,
                banked_per_height: run.banked_per_height,
                yielded_per_height: run.yielded_per_height,
                budget_exhausted: false,
            };
        }
        height += 1;
    }
}

fn build_height(
    run: &mut HeightRun<'_>,
    height: u64,
    budget: &mut SearchBudget,
) -> Option<StepOutcome> {
    let grammar = run.grammar;
    let envs = run.spec.envs();
    if height == 0 {
        for prod in grammar.productions() {
            if !prod.is_leaf() {
                continue;
            }
            let outputs: Vec<Value> = match &prod.terminal {
                Terminal::Literal(v) => vec![v.clone(); envs.len()],
                Terminal::Var(name) => envs
                    .iter()
                    .map(|env| {
                        env.get(name)
                            .unwrap_or_else(|| panic!("variable {name} unbound"))
                            .clone()
                    })
                    .collect(),
                Terminal::Op(_) => unreachable!("leaf production"),
            };
            let program = Program::leaf(prod.id);
            match run.consider(height, program, outputs, budget) {
                StepOutcome::Solved(p) => return Some(StepOutcome::Solved(p)),
                StepOutcome::Budget => return Some(StepOutcome::Budget),
                _ => {}
            }
        }
        return None;
    }

    for prod in grammar.productions() {
        let k = prod.arity();
        if k == 0 {
            continue;
        }
        let sig = match &prod.terminal {
            Terminal::Op(sig) => sig,
            _ => unreachable!("composite production"),
        };
        // Odometer over operand heights in [0, height-1]^k, lexicographic;
        // tuples without an operand at height-1 were built earlier.
        let mut heights = vec![0u64; k];
        loop {
            if heights.iter().max() == Some(&(height - 1)) {
                let counts: Vec<usize> = heights
                    .iter()
                    .zip(&prod.rhs)
                    .map(|(h, nt)| run.bank.entries(*h, *nt).len())
                    .collect();
                if counts.iter().all(|c| *c > 0) {
                    let mut idx = vec![0usize; k];
                    loop {
                        let mut outputs = Vec::with_capacity(envs.len());
                        {
                            let entries: Vec<&BankEntry> = idx
                                .iter()
                                .zip(heights.iter().zip(&prod.rhs))
                                .map(|(i, (h, nt))| &run.bank.entries(*h, *nt)[*i])
                                .collect();
                            let mut args: Vec<&Value> = Vec::with_capacity(k);
                            for e in 0..envs.len() {
                                args.clear();
                                for entry in &entries {
                                    args.push(&entry.outputs[e]);
                                }
                                outputs.push(
                                    crate::ops::apply_operator_ref(sig, &args)
                                        .expect("well-sorted candidate application"),
                                );
                            }
                        }
                        let program = {
                            let children = idx
                                .iter()
                                .zip(heights.iter().zip(&prod.rhs))
                                .map(|(i, (h, nt))| run.bank.entries(*h, *nt)[*i].program.clone())
                                .collect();
                            Program::new(prod.id, children)
                        };
                        match run.consider(height, program, outputs, budget) {
                            StepOutcome::Solved(p) => return Some(StepOutcome::Solved(p)),
                            StepOutcome::Budget => return Some(StepOutcome::Budget),
                            _ => {}
                        }
                        let mut carried = true;
                        for j in (0..k).rev() {
                            idx[j] += 1;
                            if idx[j] < counts[j] {
                                for slot in idx.iter_mut().skip(j + 1) {
                                    *slot = 0;
                                }
                                carried = false;
                                break;
                            }
                        }
                        if carried {
                            break;
                        }
                    }
                }
            }
            let mut carried = true;
            for j in (0..k).rev() {
                heights[j] += 1;
                if heights[j] <= height - 1 {
                    for slot in heights.iter_mut().skip(j + 1) {
                        *slot = 0;
                    }
                    carried = false;
                    break;
                }
            }
            if carried {
                break;
            }
        }
    }
    None
}
