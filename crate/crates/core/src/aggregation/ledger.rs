use std::collections::BTreeSet;

/// Unique unordered project pairs whose aggregated win probability was
/// computed. Its size is the comparison cost of a method.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComparisonLedger {
    pairs: BTreeSet<(usize, usize)>,
}

impl ComparisonLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `{i, j}`; returns `false` if it was already present.
    pub fn insert(&mut self, i: usize, j: usize) -> bool {
        self.pairs.insert(if i < j { (i, j) } else { (j, i) })
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&if i < j { (i, j) } else { (j, i) })
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs as `(low, high)` in ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }
}

impl FromIterator<(usize, usize)> for ComparisonLedger {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let mut l = Self::new();
        for (i, j) in iter {
            l.insert(i, j);
        }
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unordered_and_idempotent() {
        let mut l = ComparisonLedger::new();
        assert!(l.insert(3, 1));
        assert!(!l.insert(1, 3));
        assert!(l.insert(0, 2));
        assert_eq!(l.count(), 2);
        assert!(l.contains(2, 0));
        assert_eq!(l.pairs().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
    }
}
