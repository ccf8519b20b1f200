//! Shared search budgets: wall clock plus a hardware-independent candidate
//! count.
//!
//! The candidate count charges only observationally new programs (the ones
//! that enter the bank, plus a returned solution), which makes budgeted
//! outcomes machine-independent and matches how program counts are usually
//! reported for bottom-up search. Raw constructed-and-pruned tuples are
//! tracked separately, and the deadline is polled every few thousand of
//! them so even a huge level cannot overshoot the timeout by much.

use std::time::{Duration, Instant};

const DEADLINE_POLL_MASK: u64 = 0xfff;

#[derive(Debug, Clone)]
pub struct SearchBudget {
    deadline: Option<Instant>,
    max_candidates: Option<u64>,
    /// Observationally new programs encountered so far.
    pub candidates: u64,
    /// Raw tuples constructed, including pruned ones.
    pub yielded: u64,
    /// Cost levels (or heights) iterated so far.
    pub levels: u64,
}

impl SearchBudget {
    pub fn unlimited() -> SearchBudget {
        SearchBudget::new(None, None)
    }

    pub fn new(timeout: Option<Duration>, max_candidates: Option<u64>) -> SearchBudget {
        SearchBudget {
            deadline: timeout.map(|t| Instant::now() + t),
            max_candidates,
            candidates: 0,
            yielded: 0,
            levels: 0,
        }
    }

    pub fn with_max_candidates(max: u64) -> SearchBudget {
        SearchBudget::new(None, Some(max))
    }

    /// Charged once per observationally new program; false once the
    /// candidate budget is spent.
    pub fn spend_candidate(&mut self) -> bool {
        self.candidates += 1;
        match self.max_candidates {
            Some(max) => self.candidates <= max,
            None => true,
        }
    }

    /// Charged once per constructed tuple; false when the deadline has
    /// passed (polled every 4096 tuples).
    pub fn note_yield(&mut self) -> bool {
        self.yielded += 1;
        if self.yielded & DEADLINE_POLL_MASK == 0 {
            return !self.deadline_passed();
        }
        true
    }

    pub fn deadline_passed(&self) -> bool {
        matches!(self.deadline, Some(d) if Instant::now() >= d)
    }
}
