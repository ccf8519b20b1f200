//! Testing-based verifiers standing in for an SMT solver.
//!
//! The exhaustive verifier enumerates every assignment to boolean
//! universals; the sampled verifier checks a cartesian grid of per-sort
//! corner values followed by seeded random vectors. A returned
//! counterexample always falsifies at least one constraint by evaluation.

use super::{eval_constraint, SygusProblem};
use crate::eval::Env;
use crate::program::Program;
use crate::value::{Sort, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("exhaustive verification over {got} boolean variables exceeds the limit of {limit}")]
    TooManyVariables { got: usize, limit: usize },
    #[error("exhaustive verification requires boolean universals; {0} is not boolean")]
    NonBooleanUniversal(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyResult {
    Valid,
    Counterexample(Env),
}

pub trait Verifier {
    fn check(
        &self,
        problem: &SygusProblem,
        candidate: &Program,
    ) -> Result<VerifyResult, VerifierError>;
}

fn falsifies(problem: &SygusProblem, candidate: &Program, binding: &Env) -> bool {
    problem.constraints.iter().any(|c| {
        !eval_constraint(c, &problem.grammar, candidate, binding, &problem.target)
            .expect("well-sorted constraint")
    })
}

/// Checks all `2^n` assignments of the boolean universals, in counting
/// order with the first-declared variable as the least significant bit.
pub struct ExhaustiveVerifier {
    max_vars: usize,
}

pub fn exhaustive_verifier(max_vars: usize) -> ExhaustiveVerifier {
    ExhaustiveVerifier { max_vars }
}

impl Verifier for ExhaustiveVerifier {
    fn check(
        &self,
        problem: &SygusProblem,
        candidate: &Program,
    ) -> Result<VerifyResult, VerifierError> {
        let vars = &problem.universals;
        if let Some((name, _)) = vars.iter().find(|(_, s)| *s != Sort::Bool) {
            return Err(VerifierError::NonBooleanUniversal(name.clone()));
        }
        if vars.len() > self.max_vars {
            return Err(VerifierError::TooManyVariables {
                got: vars.len(),
                limit: self.max_vars,
            });
        }
        for assignment in 0u64..(1u64 << vars.len()) {
            let binding: Env = vars
                .iter()
                .enumerate()
                .map(|(i, (name, _))| (name.clone(), Value::Bool(assignment >> i & 1 == 1)))
                .collect();
            if falsifies(problem, candidate, &binding) {
                return Ok(VerifyResult::Counterexample(binding));
            }
        }
        Ok(VerifyResult::Valid)
    }
}

fn corner_values(sort: Sort) -> Vec<Value> {
    match sort {
        Sort::Bv => vec![
            Value::Bv(0),
            Value::Bv(1),
            Value::Bv(u64::MAX),
            Value::Bv(1 << 63),
            Value::Bv(0x5555_5555_5555_5555),
            Value::Bv(0xaaaa_aaaa_aaaa_aaaa),
        ],
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Sort::Int => vec![
            Value::Int(0),
            Value::Int(1),
            Value::Int(-1),
            Value::Int(i64::MAX),
            Value::Int(i64::MIN),
        ],
        Sort::Str => vec![Value::str(""), Value::str("a"), Value::str("aa")],
    }
}

fn random_value(sort: Sort, rng: &mut ChaCha8Rng) -> Value {
    match sort {
        Sort::Bv => Value::Bv(rng.gen()),
        Sort::Bool => Value::Bool(rng.gen()),
        Sort::Int => Value::Int(rng.gen()),
        Sort::Str => {
            let len = rng.gen_range(0..8);
            Value::Str((0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect())
        }
    }
}

/// Checks fixed corner values per variable (the full cartesian grid while
/// it stays small, per-variable sweeps otherwise) and then `n_samples`
/// seeded random assignments. Deterministic for a fixed seed.
pub struct SampledVerifier {
    seed: u64,
    n_samples: usize,
}

pub fn sampled_verifier(seed: u64, n_samples: usize) -> SampledVerifier {
    SampledVerifier { seed, n_samples }
}

const MAX_GRID: usize = 1 << 16;

impl Verifier for SampledVerifier {
    fn check(
        &self,
        problem: &SygusProblem,
        candidate: &Program,
    ) -> Result<VerifyResult, VerifierError> {
        let vars = &problem.universals;
        let corners: Vec<Vec<Value>> = vars.iter().map(|(_, s)| corner_values(*s)).collect();
        let grid: usize = corners.iter().map(Vec::len).product();
        let mut bindings: Vec<Env> = Vec::new();
        if vars.is_empty() {
            bindings.push(Env::new());
        } else if grid <= MAX_GRID {
            let mut idx = vec![0usize; vars.len()];
            'outer: loop {
                bindings.push(
                    vars.iter()
                        .enumerate()
                        .map(|(j, (name, _))| (name.clone(), corners[j][idx[j]].clone()))
                        .collect(),
                );
                for j in (0..vars.len()).rev() {
                    idx[j] += 1;
                    if idx[j] < corners[j].len() {
                        for slot in idx.iter_mut().skip(j + 1) {
                            *slot = 0;
                        }
                        continue 'outer;
                    }
                    if j == 0 {
                        break 'outer;
                    }
                    idx[j] = 0;
                }
            }
        } else {
            // Sweep each variable through its corners with the rest pinned.
            for (j, (_, _)) in vars.iter().enumerate() {
                for corner in &corners[j] {
                    bindings.push(
                        vars.iter()
                            .enumerate()
                            .map(|(i, (name, _))| {
                                let v = if i == j {
                                    corner.clone()
                                } else {
                                    corners[i][0].clone()
                                };
                                (name.clone(), v)
                            })
                            .collect(),
                    );
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.n_samples {
            bindings.push(
                vars.iter()
                    .map(|(name, sort)| (name.clone(), random_value(*sort, &mut rng)))
                    .collect(),
            );
        }
        for binding in bindings {
            if falsifies(problem, candidate, &binding) {
                return Ok(VerifyResult::Counterexample(binding));
            }
        }
        Ok(VerifyResult::Valid)
    }
}
