//! Compact subsets of example (or goal) indices.

use std::fmt;

/// A fixed-universe bitset recording which examples a program satisfies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExampleSet {
    universe: usize,
    bits: Vec<u64>,
}

impl ExampleSet {
    pub fn empty(universe: usize) -> ExampleSet {
        ExampleSet {
            universe,
            bits: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> ExampleSet {
        let mut s = ExampleSet::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(universe: usize, indices: &[usize]) -> ExampleSet {
        let mut s = ExampleSet::empty(universe);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(|i| self.contains(*i))
    }
}

impl fmt::Display for ExampleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "e{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_operations() {
        let mut s = ExampleSet::empty(70);
        assert!(s.is_empty() && !s.is_full());
        s.insert(0);
        s.insert(69);
        assert_eq!(s.len(), 2);
        assert!(s.contains(69) && !s.contains(68));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 69]);

        let full = ExampleSet::full(3);
        assert!(full.is_full());
        assert_eq!(full.to_string(), "{e0,e1,e2}");

        let empty_universe = ExampleSet::full(0);
        assert!(empty_universe.is_full() && empty_universe.is_empty());
    }
}
