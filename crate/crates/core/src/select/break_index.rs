use std::collections::BTreeSet;
use std::ops::Bound::{Excluded, Unbounded};

/// Ordered set of accepted change points.
///
/// Insertion, nearest-neighbour lookup and open-range containment are all
/// O(log n) worst case (B-tree).
#[derive(Debug, Clone, Default)]
pub struct BreakIndex {
    points: BTreeSet<usize>,
}

impl BreakIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if the point was already present.
    pub fn insert(&mut self, point: usize) -> bool {
        self.points.insert(point)
    }

    /// Closest stored points strictly below and strictly above `point`.
    pub fn neighbors(&self, point: usize) -> (Option<usize>, Option<usize>) {
        let pred = self.points.range(..point).next_back().copied();
        let succ = self
            .points
            .range((Excluded(point), Unbounded))
            .next()
            .copied();
        (pred, succ)
    }

    /// True iff some stored `p` satisfies `left < p < right`.
    pub fn contains_in_open_range(&self, left: usize, right: usize) -> bool {
        right > left + 1
            && self
                .points
                .range((Excluded(left), Excluded(right)))
                .next()
                .is_some()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.points.contains(&point)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().copied()
    }

    pub fn into_sorted_vec(self) -> Vec<usize> {
        self.points.into_iter().collect()
    }
}
