//! The outer synthesis-learning loop: select promising partial solutions,
//! reweight the grammar, restart the search.
//!
//! Each cycle runs the guided search for a fixed number of cost levels.
//! Partial solutions that establish a new subset of satisfied examples, or
//! strictly improve the best cost for a known subset, are selected per the
//! configured scheme and retained across cycles; every production is then
//! reweighted by `p_u(R)^(1-fit(R))` (normalized per nonterminal), where
//! fit is the best example ratio of any retained solution using the rule.
//! Any update invalidates the bank's equivalence-class representatives, so
//! the search restarts from scratch rather than re-indexing.

use crate::budget::SearchBudget;
use crate::enumerate::{
    guided_search_core, PartialSolution, PbeSpec, SearchOutcome, SearchState, SynthSpec,
};
use crate::eval::Example;
use crate::exset::ExampleSet;
use crate::grammar::{Grammar, NtId, ProdId};
use crate::pcfg::{cost_model, uniform_pcfg, Pcfg, PcfgError};
use crate::program::Program;
use log::{debug, info};
use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;
use std::time::Duration;

/// How partial solutions are chosen for rewarding the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionScheme {
    /// A single first-discovered cheapest program satisfying a subset of
    /// maximal cardinality seen so far across all cycles.
    LargestSubset,
    /// A single first-discovered cheapest program per distinct subset.
    FirstCheapest,
    /// All cheapest programs per distinct subset (ties within one cycle).
    AllCheapest,
    /// No selection: every new partial solution is used.
    All,
}

impl SelectionScheme {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionScheme::LargestSubset => "largest",
            SelectionScheme::FirstCheapest => "first-cheapest",
            SelectionScheme::AllCheapest => "all-cheapest",
            SelectionScheme::All => "all",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubsetEntry {
    pub best_cost: u64,
    pub retained: Vec<PartialSolution>,
}

/// Promising partial solutions accumulated across synthesis-learning
/// cycles. A subset, once rewarded, is never re-rewarded by an
/// equal-or-worse-cost program (under the cost-based schemes).
#[derive(Debug, Clone, Default)]
pub struct PromisingStore {
    by_subset: BTreeMap<ExampleSet, SubsetEntry>,
    max_cardinality: usize,
    /// Traces already rewarded; consulted only by the no-selection scheme.
    seen: HashSet<Vec<ProdId>>,
}

impl PromisingStore {
    pub fn new() -> PromisingStore {
        PromisingStore::default()
    }

    pub fn is_empty(&self) -> bool {
        self.by_subset.is_empty()
    }

    pub fn subsets(&self) -> impl Iterator<Item = (&ExampleSet, &SubsetEntry)> {
        self.by_subset.iter()
    }

    pub fn retained(&self) -> impl Iterator<Item = &PartialSolution> {
        self.by_subset.values().flat_map(|e| e.retained.iter())
    }

    pub fn best_cost(&self, subset: &ExampleSet) -> Option<u64> {
        self.by_subset.get(subset).map(|e| e.best_cost)
    }

    fn record(&mut self, solution: &PartialSolution) {
        match self.by_subset.get_mut(&solution.satisfied) {
            None => {
                self.by_subset.insert(
                    solution.satisfied.clone(),
                    SubsetEntry {
                        best_cost: solution.cost,
                        retained: vec![solution.clone()],
                    },
                );
            }
            Some(entry) if solution.cost < entry.best_cost => {
                entry.best_cost = solution.cost;
                entry.retained = vec![solution.clone()];
            }
            Some(entry) if solution.cost == entry.best_cost => {
                entry.retained.push(solution.clone());
            }
            Some(_) => {}
        }
    }

    fn record_unconditionally(&mut self, solution: &PartialSolution) {
        let entry = self
            .by_subset
            .entry(solution.satisfied.clone())
            .or_insert_with(|| SubsetEntry {
                best_cost: solution.cost,
                retained: Vec::new(),
            });
        entry.best_cost = entry.best_cost.min(solution.cost);
        entry.retained.push(solution.clone());
    }
}

/// Filters one cycle's partial solutions (in discovery order) down to the
/// promising ones and records them in the store. Returns the selected
/// solutions in discovery order.
pub fn select(
    psol: &[PartialSolution],
    store: &mut PromisingStore,
    scheme: SelectionScheme,
) -> Vec<PartialSolution> {
    match scheme {
        SelectionScheme::LargestSubset => {
            store.max_cardinality = store
                .max_cardinality
                .max(psol.iter().map(|p| p.satisfied.len()).max().unwrap_or(0));
            let pick = psol
                .iter()
                .filter(|p| p.satisfied.len() == store.max_cardinality)
                .min_by_key(|p| p.cost);
            match pick {
                Some(p)
                    if store
                        .best_cost(&p.satisfied)
                        .is_none_or(|best| p.cost < best) =>
                {
                    store.record(p);
                    vec![p.clone()]
                }
                _ => Vec::new(),
            }
        }
        SelectionScheme::FirstCheapest => {
            let mut out = Vec::new();
            for p in psol {
                if store.best_cost(&p.satisfied).is_none_or(|best| p.cost < best) {
                    store.record(p);
                    out.push(p.clone());
                }
            }
            out
        }
        SelectionScheme::AllCheapest => {
            let mut touched: HashSet<ExampleSet> = HashSet::new();
            let mut out = Vec::new();
            for p in psol {
                let best = store.best_cost(&p.satisfied);
                let select = match best {
                    None => true,
                    Some(best) if p.cost < best => true,
                    // An equal-cost tie counts only against a best that was
                    // itself established in this cycle.
                    Some(best) => p.cost == best && touched.contains(&p.satisfied),
                };
                if select {
                    touched.insert(p.satisfied.clone());
                    store.record(p);
                    out.push(p.clone());
                }
            }
            out
        }
        SelectionScheme::All => {
            let mut out = Vec::new();
            for p in psol {
                if store.seen.insert(p.program.trace()) {
                    store.record_unconditionally(p);
                    out.push(p.clone());
                }
            }
            out
        }
    }
}

/// Highest proportion of examples satisfied by any retained solution whose
/// trace contains the rule; 0 when no retained solution contains it.
pub fn fit(production: ProdId, store: &PromisingStore, example_count: usize) -> f64 {
    fit_table_from(store, example_count)
        .get(&production)
        .copied()
        .unwrap_or(0.0)
}

fn fit_table_from(store: &PromisingStore, example_count: usize) -> BTreeMap<ProdId, f64> {
    let mut table = BTreeMap::new();
    if example_count == 0 {
        return table;
    }
    for sol in store.retained() {
        let ratio = sol.satisfied.len() as f64 / example_count as f64;
        for prod in sol.program.trace() {
            let slot = table.entry(prod).or_insert(0.0f64);
            *slot = slot.max(ratio);
        }
    }
    table
}

/// Per-production fit values, densely indexed.
pub fn fit_table(grammar: &Grammar, store: &PromisingStore, example_count: usize) -> Vec<f64> {
    let sparse = fit_table_from(store, example_count);
    grammar
        .productions()
        .iter()
        .map(|p| sparse.get(&p.id).copied().unwrap_or(0.0))
        .collect()
}

/// Reweights every production as `p_u(R)^(1-fit(R))`, normalized per
/// nonterminal. Always recomputed from the uniform base, never compounded
/// on the previous distribution.
pub fn update_from_fits(grammar: &Arc<Grammar>, fits: &[f64]) -> Result<Pcfg, PcfgError> {
    assert_eq!(fits.len(), grammar.productions().len());
    let mut weights = vec![0.0; fits.len()];
    for (i, nt) in grammar.nonterminals().iter().enumerate() {
        let ids: Vec<ProdId> = grammar
            .productions_of(NtId(i as u32))
            .map(|p| p.id)
            .collect();
        if ids.is_empty() {
            return Err(PcfgError::EmptyNonterminal(nt.name.clone()));
        }
        let p_u = 1.0 / ids.len() as f64;
        for id in &ids {
            weights[id.index()] = p_u.powf(1.0 - fits[id.index()]);
        }
    }
    Pcfg::from_weights(Arc::clone(grammar), weights)
}

/// Recomputes the PCFG from the cumulative store.
pub fn update_pcfg(
    grammar: &Arc<Grammar>,
    store: &PromisingStore,
    example_count: usize,
) -> Result<Pcfg, PcfgError> {
    update_from_fits(grammar, &fit_table(grammar, store, example_count))
}

#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// The per-cycle cost limit is `lim_factor` times the maximum rule cost
    /// of the initial cost model.
    pub lim_factor: u64,
    pub scheme: SelectionScheme,
    pub timeout: Option<Duration>,
    pub max_candidates: Option<u64>,
    /// Optional starting distribution (e.g. supplied by a domain expert);
    /// defaults to uniform.
    pub initial_pcfg: Option<Pcfg>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            lim_factor: 6,
            scheme: SelectionScheme::FirstCheapest,
            timeout: None,
            max_candidates: None,
            initial_pcfg: None,
        }
    }
}

/// One synthesis-learning cycle as recorded in the structured log.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub cycle: usize,
    pub lvl_start: u64,
    pub lvl_end: u64,
    pub found: usize,
    pub selected: Vec<PartialSolution>,
    /// Rule cost table after this cycle's update; absent when no update ran.
    pub cost_table: Option<Vec<u64>>,
    pub restarted: bool,
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub solution: Option<Program>,
    pub cycles: Vec<CycleRecord>,
    pub candidates: u64,
    pub levels: u64,
}

/// Runs the full synthesis-learning loop on input-output examples.
pub fn probe(
    grammar: &Arc<Grammar>,
    examples: &[Example],
    config: &ProbeConfig,
) -> Result<ProbeResult, PcfgError> {
    let mut budget = SearchBudget::new(config.timeout, config.max_candidates);
    let spec = PbeSpec::new(examples);
    probe_with_budget(grammar, &spec, config, &mut budget)
}

/// As `probe`, but against an arbitrary spec and a shared budget, so a
/// caller can run several instances under one allowance.
pub fn probe_with_budget(
    grammar: &Arc<Grammar>,
    spec: &dyn SynthSpec,
    config: &ProbeConfig,
    budget: &mut SearchBudget,
) -> Result<ProbeResult, PcfgError> {
    let mut pcfg = match &config.initial_pcfg {
        Some(p) => p.clone(),
        None => uniform_pcfg(grammar)?,
    };
    // The cost limit stays fixed at lim_factor times the maximum production
    // cost of the *initial* model, even after updates enlarge rule costs.
    let lim = config.lim_factor.max(1) * cost_model(&pcfg)?.max_rule_cost();
    let mut state = SearchState::new(grammar);
    let mut store = PromisingStore::new();
    let mut cycles: Vec<CycleRecord> = Vec::new();
    let levels_before = budget.levels;
    let candidates_before = budget.candidates;
    loop {
        let cycle = cycles.len() + 1;
        state.psol.clear();
        let cm = cost_model(&pcfg)?;
        let lvl_start = state.lvl;
        let (outcome, next_state) = guided_search_core(grammar, &cm, spec, state, lim, budget);
        state = next_state;
        let lvl_end = state.lvl;
        let psol = std::mem::take(&mut state.psol);
        let found = psol.len();
        match outcome {
            SearchOutcome::Solved(p) => {
                info!("cycle {cycle}: solved at level {}", state.lvl);
                cycles.push(CycleRecord {
                    cycle,
                    lvl_start,
                    lvl_end,
                    found,
                    selected: Vec::new(),
                    cost_table: None,
                    restarted: false,
                });
                return Ok(ProbeResult {
                    solution: Some(p),
                    cycles,
                    candidates: budget.candidates - candidates_before,
                    levels: budget.levels - levels_before,
                });
            }
            SearchOutcome::Exhausted | SearchOutcome::Drained => {
                cycles.push(CycleRecord {
                    cycle,
                    lvl_start,
                    lvl_end,
                    found,
                    selected: Vec::new(),
                    cost_table: None,
                    restarted: false,
                });
                return Ok(ProbeResult {
                    solution: None,
                    cycles,
                    candidates: budget.candidates - candidates_before,
                    levels: budget.levels - levels_before,
                });
            }
            SearchOutcome::LimitReached => {}
        }
        let selected = select(&psol, &mut store, config.scheme);
        let restarted = !selected.is_empty();
        let mut cost_table = None;
        if restarted {
            pcfg = update_pcfg(grammar, &store, spec.goal_count())?;
            cost_table = Some(cost_model(&pcfg)?.costs().to_vec());
            state = SearchState::new(grammar);
            debug!(
                "cycle {cycle}: selected {} of {found}; restarting with costs {:?}",
                selected.len(),
                cost_table
            );
        } else {
            debug!("cycle {cycle}: nothing selected of {found}; resuming");
        }
        cycles.push(CycleRecord {
            cycle,
            lvl_start,
            lvl_end,
            found,
            selected,
            cost_table,
            restarted,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::GrammarBuilder;
    use crate::value::{Sort, Value};

    fn mini_grammar() -> Arc<Grammar> {
        Arc::new(
            GrammarBuilder::new()
                .nonterminal("S", Sort::Int)
                .variable("x", Sort::Int)
                .var("S", "x")
                .literal("S", Value::Int(1))
                .op("S", "+", &["S", "S"])
                .build("S")
                .unwrap(),
        )
    }

    fn psol(program: Program, universe: usize, sat: &[usize], cost: u64) -> PartialSolution {
        PartialSolution {
            program,
            satisfied: ExampleSet::from_indices(universe, sat),
            cost,
        }
    }

    #[test]
    fn no_double_reward() {
        let g = mini_grammar();
        let p = Program::leaf(crate::grammar::ProdId(0));
        let list = vec![psol(p, 3, &[0], 5)];
        for scheme in [
            SelectionScheme::LargestSubset,
            SelectionScheme::FirstCheapest,
            SelectionScheme::AllCheapest,
            SelectionScheme::All,
        ] {
            let mut store = PromisingStore::new();
            let first = select(&list, &mut store, scheme);
            assert_eq!(first.len(), 1, "{scheme:?}");
            let second = select(&list, &mut store, scheme);
            assert!(second.is_empty(), "{scheme:?}");
        }
        let _ = g;
    }

    #[test]
    fn fit_of_empty_store_is_zero() {
        let store = PromisingStore::new();
        assert_eq!(fit(ProdId(0), &store, 3), 0.0);
    }

    #[test]
    fn update_with_zero_fit_is_uniform() {
        let g = mini_grammar();
        let store = PromisingStore::new();
        let updated = update_pcfg(&g, &store, 3).unwrap();
        let uniform = uniform_pcfg(&g).unwrap();
        for (a, b) in updated.probs().iter().zip(uniform.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn strictly_cheaper_rediscovery_is_reselected() {
        let g = mini_grammar();
        let p = Program::leaf(crate::grammar::ProdId(1));
        let mut store = PromisingStore::new();
        let first = select(
            &[psol(p.clone(), 3, &[1], 21)],
            &mut store,
            SelectionScheme::FirstCheapest,
        );
        assert_eq!(first.len(), 1);
        // Same subset, lower cost after a model change: selected again.
        let cheaper = select(
            &[psol(p.clone(), 3, &[1], 14)],
            &mut store,
            SelectionScheme::FirstCheapest,
        );
        assert_eq!(cheaper.len(), 1);
        assert_eq!(store.best_cost(&ExampleSet::from_indices(3, &[1])), Some(14));
        // Equal cost: not selected.
        let equal = select(
            &[psol(p, 3, &[1], 14)],
            &mut store,
            SelectionScheme::FirstCheapest,
        );
        assert!(equal.is_empty());
        let _ = g;
    }
}
