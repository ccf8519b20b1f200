//! Counterexample-guided reduction of first-order specs to finite input
//! sets.
//!
//! Each iteration synthesizes a candidate correct on the bindings collected
//! so far (a fresh learner instance starting from a uniform grammar), then
//! asks the verifier for a counterexample; failing inputs join the set and
//! the loop continues until the verifier accepts or the budget runs out.

use super::verify::{Verifier, VerifyResult};
use super::{SygusError, SygusProblem, Term};
use crate::budget::SearchBudget;
use crate::enumerate::{guided_search_core, height_search, SearchOutcome, SearchState, SynthSpec};
use crate::eval::Env;
use crate::exset::ExampleSet;
use crate::learn::{probe_with_budget, ProbeConfig};
use crate::pcfg::CostModel;
use crate::program::Program;
use crate::value::Value;
use log::{debug, info};
use std::collections::HashMap;

/// Which enumeration drives each synthesis iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthStrategy {
    /// Cost-ordered search with on-the-fly grammar reweighting.
    Guided,
    /// Size-ordered search (all-ones cost model, no learning).
    SizeOrdered,
    /// Height-ordered search.
    HeightOrdered,
}

/// A finite set of universal bindings as an enumerable spec. Goals are
/// (binding, constraint) pairs; the evaluation environments are the
/// distinct inputs the target function is applied to across all bindings,
/// so observational equivalence is exact with respect to the constraints.
pub struct ConstraintSpec<'p> {
    problem: &'p SygusProblem,
    bindings: Vec<Env>,
    envs: Vec<Env>,
    /// For each binding, the env index of each target application in
    /// constraint traversal order.
    app_envs: Vec<Vec<usize>>,
}

impl<'p> ConstraintSpec<'p> {
    pub fn new(problem: &'p SygusProblem, bindings: &[Env]) -> ConstraintSpec<'p> {
        let mut envs: Vec<Env> = Vec::new();
        let mut index: HashMap<Env, usize> = HashMap::new();
        let mut app_envs = Vec::with_capacity(bindings.len());
        for binding in bindings {
            let mut per_binding = Vec::new();
            for c in &problem.constraints {
                collect_app_envs(c, problem, binding, &mut |env| {
                    let idx = *index.entry(env.clone()).or_insert_with(|| {
                        envs.push(env);
                        envs.len() - 1
                    });
                    per_binding.push(idx);
                });
            }
            app_envs.push(per_binding);
        }
        ConstraintSpec {
            problem,
            bindings: bindings.to_vec(),
            envs,
            app_envs,
        }
    }
}

/// Visits every target application in traversal order, computing the input
/// environment it applies the candidate to.
fn collect_app_envs(
    term: &Term,
    problem: &SygusProblem,
    binding: &Env,
    visit: &mut impl FnMut(Env),
) {
    match term {
        Term::Lit(_) | Term::Var(..) => {}
        Term::App(_, args) => {
            for a in args {
                collect_app_envs(a, problem, binding, visit);
            }
        }
        Term::Target(args) => {
            // Argument terms cannot contain nested target applications.
            let env: Env = args
                .iter()
                .zip(&problem.target.params)
                .map(|(arg, (name, _))| {
                    let v = eval_term_no_target(arg, binding);
                    (name.clone(), v)
                })
                .collect();
            visit(env);
        }
    }
}

fn eval_term_no_target(term: &Term, binding: &Env) -> Value {
    match term {
        Term::Lit(v) => v.clone(),
        Term::Var(name, _) => binding.get(name).expect("bound universal").clone(),
        Term::App(sig, args) => {
            let vals: Vec<Value> = args.iter().map(|a| eval_term_no_target(a, binding)).collect();
            crate::ops::apply_operator(sig, &vals).expect("well-sorted constraint")
        }
        Term::Target(_) => unreachable!("nested target application rejected at parse"),
    }
}

/// Truth of a term with target applications looked up from precomputed
/// outputs, consumed in the same traversal order they were collected in.
fn eval_with_outputs(
    term: &Term,
    binding: &Env,
    outputs: &[Value],
    app_envs: &[usize],
    cursor: &mut usize,
) -> Value {
    match term {
        Term::Lit(v) => v.clone(),
        Term::Var(name, _) => binding.get(name).expect("bound universal").clone(),
        Term::App(sig, args) => {
            let vals: Vec<Value> = args
                .iter()
                .map(|a| eval_with_outputs(a, binding, outputs, app_envs, cursor))
                .collect();
            crate::ops::apply_operator(sig, &vals).expect("well-sorted constraint")
        }
        Term::Target(args) => {
            // Arguments contain no target applications, so the cursor only
            // advances for this node.
            let _ = args;
            let idx = app_envs[*cursor];
            *cursor += 1;
            outputs[idx].clone()
        }
    }
}

impl SynthSpec for ConstraintSpec<'_> {
    fn envs(&self) -> &[Env] {
        &self.envs
    }

    fn goal_count(&self) -> usize {
        self.bindings.len() * self.problem.constraints.len()
    }

    fn satisfied(&self, outputs: &[Value]) -> ExampleSet {
        let n_constraints = self.problem.constraints.len();
        let mut set = ExampleSet::empty(self.goal_count());
        for (b, binding) in self.bindings.iter().enumerate() {
            let mut cursor = 0usize;
            for (c, constraint) in self.problem.constraints.iter().enumerate() {
                let value = eval_with_outputs(
                    constraint,
                    binding,
                    outputs,
                    &self.app_envs[b],
                    &mut cursor,
                );
                if value == Value::Bool(true) {
                    set.insert(b * n_constraints + c);
                }
            }
        }
        set
    }
}

#[derive(Debug, Clone)]
pub struct CegisOutcome {
    pub solution: Option<Program>,
    pub iterations: usize,
}

/// Runs the counterexample-guided loop. The binding set is seeded with the
/// all-zeros assignment and grows strictly with each verifier refutation.
pub fn cegis(
    problem: &SygusProblem,
    strategy: SynthStrategy,
    config: &ProbeConfig,
    verifier: &dyn Verifier,
    budget: &mut SearchBudget,
) -> Result<CegisOutcome, SygusError> {
    let grammar = &problem.grammar;
    let mut bindings: Vec<Env> = vec![problem
        .universals
        .iter()
        .map(|(name, sort)| (name.clone(), Value::zero(*sort)))
        .collect()];
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let spec = ConstraintSpec::new(problem, &bindings);
        let candidate = match strategy {
            SynthStrategy::Guided => {
                probe_with_budget(grammar, &spec, config, budget)?.solution
            }
            SynthStrategy::SizeOrdered => {
                let cm = CostModel::unit(grammar);
                let state = SearchState::new(grammar);
                match guided_search_core(grammar, &cm, &spec, state, u64::MAX, budget) {
                    (SearchOutcome::Solved(p), _) => Some(p),
                    _ => None,
                }
            }
            SynthStrategy::HeightOrdered => {
                height_search(grammar, &spec, None, budget).solution
            }
        };
        let candidate = match candidate {
            Some(p) => p,
            None => {
                debug!("iteration {iterations}: synthesis gave up");
                return Ok(CegisOutcome {
                    solution: None,
                    iterations,
                });
            }
        };
        match verifier.check(problem, &candidate)? {
            VerifyResult::Valid => {
                info!(
                    "iteration {iterations}: verified {}",
                    candidate.display(grammar)
                );
                return Ok(CegisOutcome {
                    solution: Some(candidate),
                    iterations,
                });
            }
            VerifyResult::Counterexample(cex) => {
                debug!(
                    "iteration {iterations}: counterexample for {}",
                    candidate.display(grammar)
                );
                debug_assert!(
                    !bindings.contains(&cex),
                    "verifier repeated a collected binding"
                );
                if bindings.contains(&cex) {
                    return Ok(CegisOutcome {
                        solution: None,
                        iterations,
                    });
                }
                bindings.push(cex);
            }
        }
    }
}
