//! Cost-ordered bottom-up enumeration with observational-equivalence
//! pruning and partial-solution capture, plus the height-ordered baseline.

mod bank;
mod height;
mod new_programs;

pub use bank::{Bank, BankEntry, EvalCache, PartialSolution};
pub use height::{height_search, HeightSearchResult};
pub use new_programs::{new_programs, CandidateRef, LevelCandidates};

use crate::budget::SearchBudget;
use crate::eval::{Env, Example};
use crate::exset::ExampleSet;
use crate::grammar::{Grammar, Terminal};
use crate::pcfg::{cost_model, CostModel, Pcfg, PcfgError};
use crate::program::Program;
use crate::value::Value;
use log::debug;
use std::sync::Arc;

/// What the enumerator searches against: a list of evaluation environments
/// (the observational-equivalence probe points) and a judgment of which
/// goals a given output vector satisfies.
pub trait SynthSpec {
    fn envs(&self) -> &[Env];
    fn goal_count(&self) -> usize;
    fn satisfied(&self, outputs: &[Value]) -> ExampleSet;
}

/// Input-output examples as a spec: one environment per example, goal `i`
/// satisfied exactly when output `i` equals the expected output.
#[derive(Debug, Clone)]
pub struct PbeSpec {
    envs: Vec<Env>,
    expected: Vec<Value>,
}

impl PbeSpec {
    pub fn new(examples: &[Example]) -> PbeSpec {
        PbeSpec {
            envs: examples.iter().map(|e| e.inputs.clone()).collect(),
            expected: examples.iter().map(|e| e.output.clone()).collect(),
        }
    }
}

impl SynthSpec for PbeSpec {
    fn envs(&self) -> &[Env] {
        &self.envs
    }

    fn goal_count(&self) -> usize {
        self.expected.len()
    }

    fn satisfied(&self, outputs: &[Value]) -> ExampleSet {
        let mut set = ExampleSet::empty(self.expected.len());
        for (i, (got, want)) in outputs.iter().zip(&self.expected).enumerate() {
            if got == want {
                set.insert(i);
            }
        }
        set
    }
}

/// The resumable state of a search: current cost level, bank, cache and the
/// partial solutions found so far. All bank levels below `lvl` are complete
/// up to observational equivalence.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub lvl: u64,
    pub bank: Bank,
    pub cache: EvalCache,
    pub psol: Vec<PartialSolution>,
}

impl SearchState {
    pub fn new(grammar: &Grammar) -> SearchState {
        SearchState {
            lvl: 0,
            bank: Bank::new(grammar),
            cache: EvalCache::new(grammar),
            psol: Vec::new(),
        }
    }

    pub fn is_fresh(&self) -> bool {
        self.lvl == 0 && self.bank.total() == 0 && self.psol.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// A program satisfying every goal, found mid-level and returned before
    /// the remaining candidates of that level were constructed.
    Solved(Program),
    /// The cost limit was reached; the state can be resumed.
    LimitReached,
    /// Wall clock or candidate budget ran out.
    Exhausted,
    /// No candidate can ever be yielded again: the language reachable from
    /// the bank is fully enumerated.
    Drained,
}

/// Evaluates a candidate over all environments, reusing each banked child's
/// cached output vector: one operator application per environment instead
/// of a full tree walk.
fn candidate_outputs(
    grammar: &Grammar,
    cand: &CandidateRef,
    bank: &Bank,
    envs: &[Env],
) -> Vec<Value> {
    let prod = grammar.production(cand.production);
    match &prod.terminal {
        Terminal::Literal(v) => vec![v.clone(); envs.len()],
        Terminal::Var(name) => envs
            .iter()
            .map(|env| {
                env.get(name)
                    .unwrap_or_else(|| panic!("variable {name} unbound"))
                    .clone()
            })
            .collect(),
        Terminal::Op(sig) => {
            let child_outputs: Vec<&Arc<Vec<Value>>> = cand
                .children
                .iter()
                .zip(&prod.rhs)
                .map(|((lvl, idx), nt)| &bank.entry(*lvl, *nt, *idx).outputs)
                .collect();
            let mut out = Vec::with_capacity(envs.len());
            let mut args: Vec<&Value> = Vec::with_capacity(child_outputs.len());
            for i in 0..envs.len() {
                args.clear();
                for outputs in &child_outputs {
                    args.push(&outputs[i]);
                }
                out.push(
                    crate::ops::apply_operator_ref(sig, &args)
                        .expect("well-sorted candidate application"),
                );
            }
            out
        }
    }
}

/// Once the current level exceeds this bound, no production applied to
/// banked children (nor any leaf) can reach it, so the search is drained.
fn drain_bound(grammar: &Grammar, cm: &CostModel, bank: &Bank) -> u64 {
    let max_arity = grammar
        .productions()
        .iter()
        .map(Production::arity)
        .max()
        .unwrap_or(0) as u64;
    match bank.max_nonempty_level() {
        Some(m) => cm.max_rule_cost() + max_arity * m,
        None => cm.max_rule_cost(),
    }
}

use crate::grammar::Production;

/// One bottom-up pass: iterates cost levels from `state.lvl` to
/// `state.lvl + lim` inclusive, evaluating every candidate, returning a
/// full solution immediately, discarding observationally equivalent
/// programs, capturing partial solutions, and banking the rest.
pub fn guided_search_core(
    grammar: &Grammar,
    cm: &CostModel,
    spec: &dyn SynthSpec,
    mut state: SearchState,
    lim: u64,
    budget: &mut SearchBudget,
) -> (SearchOutcome, SearchState) {
    let start_nt = grammar.start();
    let lvl0 = state.lvl;
    let last = lvl0.saturating_add(lim);
    while state.lvl <= last {
        if budget.deadline_passed() {
            return (SearchOutcome::Exhausted, state);
        }
        if state.lvl > drain_bound(grammar, cm, &state.bank) {
            return (SearchOutcome::Drained, state);
        }
        budget.levels += 1;
        let lvl = state.lvl;
        state.bank.ensure_level(lvl);
        let mut yielded = 0usize;
        let mut banked = 0usize;
        let psol_before = state.psol.len();
        let mut iter = LevelCandidates::new(grammar, cm, lvl, &state.bank);
        while let Some(cand) = iter.next() {
            if !budget.note_yield() {
                return (SearchOutcome::Exhausted, state);
            }
            yielded += 1;
            let outputs = candidate_outputs(grammar, &cand, &state.bank, spec.envs());
            let sat = spec.satisfied(&outputs);
            let nt = grammar.production(cand.production).lhs;
            if nt == start_nt && sat.is_full() {
                if !budget.spend_candidate() {
                    return (SearchOutcome::Exhausted, state);
                }
                let program = cand.build(grammar, &state.bank);
                debug!(
                    "lvl {lvl}: solution {} after {yielded} candidates",
                    program.display(grammar)
                );
                return (SearchOutcome::Solved(program), state);
            }
            if state.cache.contains(nt, &outputs) {
                continue;
            }
            if !budget.spend_candidate() {
                return (SearchOutcome::Exhausted, state);
            }
            let program = cand.build(grammar, &state.bank);
            if nt == start_nt && !sat.is_empty() {
                state.psol.push(PartialSolution {
                    program: program.clone(),
                    satisfied: sat,
                    cost: lvl,
                });
            }
            let outputs = Arc::new(outputs);
            state.cache.insert(nt, Arc::clone(&outputs));
            state.bank.push(lvl, nt, BankEntry { program, outputs });
            banked += 1;
        }
        debug!(
            "lvl {lvl}: yielded {yielded} banked {banked} partial {}",
            state.psol.len() - psol_before
        );
        state.lvl += 1;
    }
    (SearchOutcome::LimitReached, state)
}

/// Searches programs of the PCFG in order of increasing discrete cost until
/// a program matching every example is found or `lim` levels beyond the
/// initial state have been explored. Absence of a solution is a value, not
/// an error.
pub fn guided_search(
    pcfg: &Pcfg,
    examples: &[Example],
    init: SearchState,
    lim: u64,
    budget: &mut SearchBudget,
) -> Result<(Option<Program>, SearchState), PcfgError> {
    let cm = cost_model(pcfg)?;
    let spec = PbeSpec::new(examples);
    let (outcome, state) = guided_search_core(pcfg.grammar(), &cm, &spec, init, lim, budget);
    let solution = match outcome {
        SearchOutcome::Solved(p) => Some(p),
        _ => None,
    };
    Ok((solution, state))
}
