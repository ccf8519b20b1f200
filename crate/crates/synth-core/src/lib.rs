//! Syntax-guided synthesis by cost-ordered bottom-up enumeration.
//!
//! Programs are enumerated in order of increasing discrete cost under a
//! probabilistic grammar, pruned by observational equivalence, and the
//! grammar's probabilities are reweighted during search from the partial
//! solutions encountered along the way. Unguided size- and height-ordered
//! baselines share the same machinery, and a SyGuS frontend parses
//! benchmark files and reduces first-order specs to examples with
//! testing-based verifiers.

pub mod budget;
pub mod enumerate;
pub mod eval;
pub mod exset;
pub mod grammar;
pub mod learn;
pub mod ops;
pub mod pcfg;
pub mod program;
pub mod sygus;
pub mod testkit;
pub mod value;

pub use budget::SearchBudget;
pub use enumerate::{
    guided_search, guided_search_core, height_search, new_programs, Bank, BankEntry, EvalCache,
    HeightSearchResult, PartialSolution, PbeSpec, SearchOutcome, SearchState, SynthSpec,
};
pub use eval::{eval, eval_on_examples, Env, Example};
pub use exset::ExampleSet;
pub use grammar::{Grammar, GrammarBuilder, GrammarError, NtId, NonTerminal, ProdId, Production, Terminal};
pub use learn::{
    fit, probe, probe_with_budget, select, update_from_fits, update_pcfg, CycleRecord,
    ProbeConfig, ProbeResult, PromisingStore, SelectionScheme,
};
pub use ops::{apply_operator, apply_operator_ref, resolve_operator, MalformedApplication, OperatorSig};
pub use pcfg::{cost_model, program_cost, program_probability, rule_cost, uniform_pcfg, CostModel, Pcfg, PcfgError};
pub use program::Program;
pub use value::{Sort, Value};
