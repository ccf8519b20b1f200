//! Streaming enumeration of all programs at one cost level.
//!
//! Zero-arity productions whose rule cost equals the level are yielded
//! directly. For a production of arity `k` and cost below the level, every
//! composition of the remaining budget into `k` positive child costs is
//! visited in descending lexicographic order, and for each composition
//! every tuple of bank entries with matching costs and nonterminals is
//! visited with the last slot varying fastest. Productions are visited in
//! declaration order, so enumeration order is deterministic.
//!
//! Descending composition order gives the first child the largest budget
//! first. Useful programs are predominantly left-nested chains, so when a
//! level contains a solution it tends to appear within the level's first
//! few thousand candidates instead of its last.

use crate::grammar::{Grammar, ProdId};
use crate::pcfg::CostModel;
use crate::program::Program;

use super::bank::Bank;

/// A candidate at the current level: a top production plus, per child slot,
/// the (cost level, insertion index) of a banked subprogram. The child
/// nonterminal is the corresponding rhs entry of the production.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRef {
    pub production: ProdId,
    pub children: Vec<(u64, usize)>,
}

pub struct LevelCandidates<'a> {
    grammar: &'a Grammar,
    cm: &'a CostModel,
    lvl: u64,
    /// Bank entry counts for levels < lvl, snapshotted at creation.
    sizes: Vec<Vec<usize>>,
    prod_cursor: usize,
    comp: Option<Vec<u64>>,
    idx: Vec<usize>,
    emitted: bool,
}

impl<'a> LevelCandidates<'a> {
    pub fn new(grammar: &'a Grammar, cm: &'a CostModel, lvl: u64, bank: &Bank) -> Self {
        LevelCandidates {
            grammar,
            cm,
            lvl,
            sizes: bank.sizes_below(lvl),
            prod_cursor: 0,
            comp: None,
            idx: Vec::new(),
            emitted: false,
        }
    }

    fn size_of(&self, lvl: u64, nt_index: usize) -> usize {
        self.sizes
            .get(lvl as usize)
            .map(|per_nt| per_nt[nt_index])
            .unwrap_or(0)
    }

    fn composition_feasible(&self, parts: &[u64], rhs: &[crate::grammar::NtId]) -> bool {
        parts
            .iter()
            .zip(rhs)
            .all(|(c, nt)| self.size_of(*c, nt.index()) > 0)
    }

    fn advance_production(&mut self) {
        self.prod_cursor += 1;
        self.comp = None;
        self.idx.clear();
        self.emitted = false;
    }
}

/// Greatest composition of `total` into `k` positive parts:
/// (total-k+1, 1, ..., 1).
fn first_composition(total: u64, k: usize) -> Vec<u64> {
    let mut parts = vec![1; k];
    parts[0] = total - (k as u64 - 1);
    parts
}

/// Advances to the descending-lexicographic successor; false when
/// exhausted. The successor decrements the rightmost decrementable slot
/// and packs the remainder as far left as possible.
fn next_composition(parts: &mut [u64], total: u64) -> bool {
    let k = parts.len();
    if k <= 1 {
        return false;
    }
    for i in (0..k - 1).rev() {
        if parts[i] > 1 {
            parts[i] -= 1;
            let used: u64 = parts[..=i].iter().sum();
            let remaining = total - used;
            let tail = (k - i - 2) as u64;
            parts[i + 1] = remaining - tail;
            for part in parts.iter_mut().skip(i + 2) {
                *part = 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for LevelCandidates<'_> {
    type Item = CandidateRef;

    fn next(&mut self) -> Option<CandidateRef> {
        loop {
            let prod = match self.grammar.productions().get(self.prod_cursor) {
                Some(p) => p,
                None => return None,
            };
            let k = prod.arity();
            let cost = self.cm.cost(prod.id);
            if k == 0 {
                self.advance_production();
                if cost == self.lvl {
                    return Some(CandidateRef {
                        production: prod.id,
                        children: Vec::new(),
                    });
                }
                continue;
            }
            if cost >= self.lvl || self.lvl - cost < k as u64 {
                self.advance_production();
                continue;
            }
            let total = self.lvl - cost;
            if self.comp.is_none() {
                self.comp = Some(first_composition(total, k));
                self.idx.clear();
                self.emitted = false;
            }
            // Find the next unemitted (composition, index tuple) pair;
            // falling out of this loop means the production is exhausted.
            loop {
                if self.idx.is_empty() {
                    let feasible = self
                        .composition_feasible(self.comp.as_ref().expect("composition"), &prod.rhs);
                    if feasible {
                        self.idx = vec![0; k];
                        self.emitted = false;
                    } else if !next_composition(self.comp.as_mut().expect("composition"), total) {
                        break;
                    }
                    continue;
                }
                if self.emitted {
                    // Advance the odometer, last slot fastest.
                    let sizes: Vec<usize> = {
                        let parts = self.comp.as_ref().expect("composition");
                        parts
                            .iter()
                            .zip(&prod.rhs)
                            .map(|(c, nt)| self.size_of(*c, nt.index()))
                            .collect()
                    };
                    let mut carried = true;
                    for j in (0..k).rev() {
                        self.idx[j] += 1;
                        if self.idx[j] < sizes[j] {
                            for slot in self.idx.iter_mut().skip(j + 1) {
                                *slot = 0;
                            }
                            carried = false;
                            break;
                        }
                    }
                    if carried {
                        if !next_composition(self.comp.as_mut().expect("composition"), total) {
                            break;
                        }
                        self.idx.clear();
                        continue;
                    }
                    self.emitted = false;
                }
                self.emitted = true;
                let children = self
                    .comp
                    .as_ref()
                    .expect("composition")
                    .iter()
                    .zip(&self.idx)
                    .map(|(c, i)| (*c, *i))
                    .collect();
                return Some(CandidateRef {
                    production: prod.id,
                    children,
                });
            }
            self.advance_production();
        }
    }
}

impl CandidateRef {
    /// Materializes the program tree, sharing banked subtrees.
    pub fn build(&self, grammar: &Grammar, bank: &Bank) -> Program {
        let prod = grammar.production(self.production);
        let children = self
            .children
            .iter()
            .zip(&prod.rhs)
            .map(|((lvl, idx), nt)| bank.entry(*lvl, *nt, *idx).program.clone())
            .collect();
        Program::new(self.production, children)
    }
}

/// Iterator over exactly the programs of cost `lvl`, lazily constructed.
/// The bank must be complete for all levels below `lvl`.
pub fn new_programs<'a>(
    grammar: &'a Grammar,
    cm: &'a CostModel,
    lvl: u64,
    bank: &'a Bank,
) -> impl Iterator<Item = Program> + 'a {
    LevelCandidates::new(grammar, cm, lvl, bank).map(move |c| c.build(grammar, bank))
}
