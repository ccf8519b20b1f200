//! Context-free grammars over the operator catalog.
//!
//! A grammar is a set of sorted nonterminals plus productions of the form
//! `N -> (t N1 ... Nk)` where `t` is an operator, literal or variable
//! terminal. Programs reference productions by stable identifier, so the
//! same operator under different nonterminals stays distinct.

use crate::ops::{resolve_operator, OperatorSig};
use crate::value::{Sort, Value};
use std::fmt;
use thiserror::Error;

/// Index of a nonterminal within its grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

/// Stable identifier of a production within its grammar (declaration order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProdId(pub u32);

impl NtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ProdId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The terminal symbol of a production.
#[derive(Debug, Clone, PartialEq)]
pub enum Terminal {
    /// An operator application; arity equals the production's rhs length.
    Op(&'static OperatorSig),
    /// A literal constant (arity 0).
    Literal(Value),
    /// A reference to an input variable (arity 0).
    Var(String),
}

impl Terminal {
    pub fn arity(&self) -> usize {
        match self {
            Terminal::Op(sig) => sig.arity(),
            _ => 0,
        }
    }

    pub fn result_sort(&self) -> Option<Sort> {
        match self {
            Terminal::Op(sig) => Some(sig.result_sort),
            Terminal::Literal(v) => Some(v.sort()),
            Terminal::Var(_) => None,
        }
    }

    /// The name of an `ite` terminal is literally "ite"; used for the
    /// case-split metric.
    pub fn is_ite(&self) -> bool {
        matches!(self, Terminal::Op(sig) if sig.name == "ite")
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::Op(sig) => write!(f, "{}", sig.name),
            Terminal::Literal(v) => write!(f, "{v}"),
            Terminal::Var(name) => write!(f, "{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonTerminal {
    pub name: String,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub id: ProdId,
    pub lhs: NtId,
    pub terminal: Terminal,
    pub rhs: Vec<NtId>,
}

impl Production {
    pub fn arity(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.rhs.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("unknown nonterminal {0}")]
    UnknownNonterminal(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("no operator named {name} accepting ({sorts})")]
    UnknownOperator { name: String, sorts: String },
    #[error("production for {nt} has terminal of sort {got}, expected {expected}")]
    SortMismatch {
        nt: String,
        expected: Sort,
        got: Sort,
    },
    #[error("nonterminal {0} has no productions")]
    EmptyNonterminal(String),
    #[error("duplicate nonterminal {0}")]
    DuplicateNonterminal(String),
    #[error("grammar has no nonterminals")]
    NoNonterminals,
}

/// A context-free grammar with sorted nonterminals. Immutable after
/// construction; shared freely across search states.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    nonterminals: Vec<NonTerminal>,
    productions: Vec<Production>,
    start: NtId,
    /// Declared input variables (name, sort) in declaration order.
    variables: Vec<(String, Sort)>,
    by_lhs: Vec<Vec<ProdId>>,
}

impl Grammar {
    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn nonterminals(&self) -> &[NonTerminal] {
        &self.nonterminals
    }

    pub fn nonterminal(&self, id: NtId) -> &NonTerminal {
        &self.nonterminals[id.index()]
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn production(&self, id: ProdId) -> &Production {
        &self.productions[id.index()]
    }

    /// Productions with the given left-hand side, in declaration order.
    pub fn productions_of(&self, nt: NtId) -> impl Iterator<Item = &Production> + '_ {
        self.by_lhs[nt.index()].iter().map(|id| self.production(*id))
    }

    pub fn variables(&self) -> &[(String, Sort)] {
        &self.variables
    }

    pub fn nt_by_name(&self, name: &str) -> Option<NtId> {
        self.nonterminals
            .iter()
            .position(|nt| nt.name == name)
            .map(|i| NtId(i as u32))
    }
}

/// Incremental grammar construction; operator names are resolved against
/// the catalog (including aliases) when `build` runs.
#[derive(Debug, Default)]
pub struct GrammarBuilder {
    nonterminals: Vec<NonTerminal>,
    variables: Vec<(String, Sort)>,
    raw: Vec<RawProduction>,
}

#[derive(Debug)]
enum RawProduction {
    Op {
        lhs: String,
        name: String,
        rhs: Vec<String>,
    },
    Literal {
        lhs: String,
        value: Value,
    },
    Var {
        lhs: String,
        name: String,
    },
}

impl GrammarBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nonterminal(mut self, name: &str, sort: Sort) -> Self {
        self.nonterminals.push(NonTerminal {
            name: name.to_string(),
            sort,
        });
        self
    }

    pub fn variable(mut self, name: &str, sort: Sort) -> Self {
        self.variables.push((name.to_string(), sort));
        self
    }

    pub fn var(mut self, lhs: &str, name: &str) -> Self {
        self.raw.push(RawProduction::Var {
            lhs: lhs.to_string(),
            name: name.to_string(),
        });
        self
    }

    pub fn literal(mut self, lhs: &str, value: Value) -> Self {
        self.raw.push(RawProduction::Literal {
            lhs: lhs.to_string(),
            value,
        });
        self
    }

    pub fn op(mut self, lhs: &str, name: &str, rhs: &[&str]) -> Self {
        self.raw.push(RawProduction::Op {
            lhs: lhs.to_string(),
            name: name.to_string(),
            rhs: rhs.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn build(self, start: &str) -> Result<Grammar, GrammarError> {
        if self.nonterminals.is_empty() {
            return Err(GrammarError::NoNonterminals);
        }
        for (i, nt) in self.nonterminals.iter().enumerate() {
            if self.nonterminals[..i].iter().any(|o| o.name == nt.name) {
                return Err(GrammarError::DuplicateNonterminal(nt.name.clone()));
            }
        }
        let find_nt = |name: &str| -> Result<NtId, GrammarError> {
            self.nonterminals
                .iter()
                .position(|nt| nt.name == name)
                .map(|i| NtId(i as u32))
                .ok_or_else(|| GrammarError::UnknownNonterminal(name.to_string()))
        };
        let start = find_nt(start)?;
        let mut productions = Vec::with_capacity(self.raw.len());
        for raw in &self.raw {
            let id = ProdId(productions.len() as u32);
            let prod = match raw {
                RawProduction::Var { lhs, name } => {
                    let lhs = find_nt(lhs)?;
                    let lhs_sort = self.nonterminals[lhs.index()].sort;
                    let (_, var_sort) = self
                        .variables
                        .iter()
                        .find(|(v, _)| v == name)
                        .ok_or_else(|| GrammarError::UnknownVariable(name.clone()))?;
                    if *var_sort != lhs_sort {
                        return Err(GrammarError::SortMismatch {
                            nt: self.nonterminals[lhs.index()].name.clone(),
                            expected: lhs_sort,
                            got: *var_sort,
                        });
                    }
                    Production {
                        id,
                        lhs,
                        terminal: Terminal::Var(name.clone()),
                        rhs: Vec::new(),
                    }
                }
                RawProduction::Literal { lhs, value } => {
                    let lhs = find_nt(lhs)?;
                    let lhs_sort = self.nonterminals[lhs.index()].sort;
                    if value.sort() != lhs_sort {
                        return Err(GrammarError::SortMismatch {
                            nt: self.nonterminals[lhs.index()].name.clone(),
                            expected: lhs_sort,
                            got: value.sort(),
                        });
                    }
                    Production {
                        id,
                        lhs,
                        terminal: Terminal::Literal(value.clone()),
                        rhs: Vec::new(),
                    }
                }
                RawProduction::Op { lhs, name, rhs } => {
                    let lhs = find_nt(lhs)?;
                    let lhs_sort = self.nonterminals[lhs.index()].sort;
                    let rhs: Vec<NtId> = rhs
                        .iter()
                        .map(|n| find_nt(n))
                        .collect::<Result<_, _>>()?;
                    let arg_sorts: Vec<Sort> = rhs
                        .iter()
                        .map(|nt| self.nonterminals[nt.index()].sort)
                        .collect();
                    let sig = resolve_operator(name, &arg_sorts).ok_or_else(|| {
                        GrammarError::UnknownOperator {
                            name: name.clone(),
                            sorts: arg_sorts
                                .iter()
                                .map(|s| s.to_string())
                                .collect::<Vec<_>>()
                                .join(" "),
                        }
                    })?;
                    if sig.result_sort != lhs_sort {
                        return Err(GrammarError::SortMismatch {
                            nt: self.nonterminals[lhs.index()].name.clone(),
                            expected: lhs_sort,
                            got: sig.result_sort,
                        });
                    }
                    Production {
                        id,
                        lhs,
                        terminal: Terminal::Op(sig),
                        rhs,
                    }
                }
            };
            productions.push(prod);
        }
        let mut by_lhs = vec![Vec::new(); self.nonterminals.len()];
        for p in &productions {
            by_lhs[p.lhs.index()].push(p.id);
        }
        Ok(Grammar {
            nonterminals: self.nonterminals,
            productions,
            start,
            variables: self.variables,
            by_lhs,
        })
    }
}
