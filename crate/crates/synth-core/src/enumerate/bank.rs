//! The program bank and evaluation cache.
//!
//! The bank stores every retained program indexed by (cost level,
//! nonterminal); the cache holds exactly the output vectors of banked
//! programs per nonterminal, so membership is the observational-equivalence
//! test. Output vectors are shared between bank and cache and compared by
//! full value equality.

use crate::exset::ExampleSet;
use crate::grammar::{Grammar, NtId};
use crate::program::Program;
use crate::value::Value;
use std::collections::HashSet;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct BankEntry {
    pub program: Program,
    pub outputs: Arc<Vec<Value>>,
}

#[derive(Debug, Clone)]
pub struct Bank {
    /// `levels[lvl][nt]` holds entries in insertion order.
    levels: Vec<Vec<Vec<BankEntry>>>,
    n_nts: usize,
    max_nonempty: Option<u64>,
    total: usize,
}

impl Bank {
    pub fn new(grammar: &Grammar) -> Bank {
        Bank {
            levels: Vec::new(),
            n_nts: grammar.nonterminals().len(),
            max_nonempty: None,
            total: 0,
        }
    }

    pub fn ensure_level(&mut self, lvl: u64) {
        while self.levels.len() <= lvl as usize {
            self.levels.push(vec![Vec::new(); self.n_nts]);
        }
    }

    pub fn push(&mut self, lvl: u64, nt: NtId, entry: BankEntry) {
        self.ensure_level(lvl);
        self.levels[lvl as usize][nt.index()].push(entry);
        self.max_nonempty = Some(self.max_nonempty.map_or(lvl, |m| m.max(lvl)));
        self.total += 1;
    }

    pub fn entries(&self, lvl: u64, nt: NtId) -> &[BankEntry] {
        self.levels
            .get(lvl as usize)
            .map(|per_nt| per_nt[nt.index()].as_slice())
            .unwrap_or(&[])
    }

    pub fn entry(&self, lvl: u64, nt: NtId, idx: usize) -> &BankEntry {
        &self.levels[lvl as usize][nt.index()][idx]
    }

    /// Entry counts per nonterminal for all levels strictly below `lvl`;
    /// candidate iterators snapshot this so banking at `lvl` can proceed
    /// while a level is being enumerated.
    pub fn sizes_below(&self, lvl: u64) -> Vec<Vec<usize>> {
        (0..lvl as usize)
            .map(|l| {
                (0..self.n_nts)
                    .map(|nt| {
                        self.levels
                            .get(l)
                            .map(|per_nt| per_nt[nt].len())
                            .unwrap_or(0)
                    })
                    .collect()
            })
            .collect()
    }

    /// Number of programs banked at a level, over all nonterminals.
    pub fn count_at(&self, lvl: u64) -> usize {
        self.levels
            .get(lvl as usize)
            .map(|per_nt| per_nt.iter().map(Vec::len).sum())
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn max_nonempty_level(&self) -> Option<u64> {
        self.max_nonempty
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (u64, NtId, &BankEntry)> + '_ {
        self.levels.iter().enumerate().flat_map(|(lvl, per_nt)| {
            per_nt.iter().enumerate().flat_map(move |(nt, entries)| {
                entries
                    .iter()
                    .map(move |e| (lvl as u64, NtId(nt as u32), e))
            })
        })
    }
}

/// Per-nonterminal set of output vectors already represented in the bank.
#[derive(Debug, Clone)]
pub struct EvalCache {
    seen: Vec<HashSet<Arc<Vec<Value>>>>,
}

impl EvalCache {
    pub fn new(grammar: &Grammar) -> EvalCache {
        EvalCache {
            seen: vec![HashSet::new(); grammar.nonterminals().len()],
        }
    }

    pub fn contains(&self, nt: NtId, outputs: &Vec<Value>) -> bool {
        self.seen[nt.index()].contains(outputs)
    }

    pub fn insert(&mut self, nt: NtId, outputs: Arc<Vec<Value>>) {
        self.seen[nt.index()].insert(outputs);
    }

    pub fn len(&self, nt: NtId) -> usize {
        self.seen[nt.index()].len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.iter().all(HashSet::is_empty)
    }
}

/// A program that satisfies a nonempty proper subset of the examples,
/// captured together with the cost level it was discovered at.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSolution {
    pub program: Program,
    pub satisfied: ExampleSet,
    pub cost: u64,
}
