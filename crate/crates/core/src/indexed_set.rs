//! A set of vertex ids with O(1) insert, remove, membership and uniform
//! sampling.

use rand::Rng;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IndexedSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl IndexedSet {
    /// Empty set over the universe `0..universe`.
    pub fn new(universe: usize) -> Self {
        Self {
            items: Vec::new(),
            pos: vec![ABSENT; universe],
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    /// Returns `false` if `v` was already present.
    pub fn insert(&mut self, v: usize) -> bool {
        if self.contains(v) {
            return false;
        }
        self.pos[v] = self.items.len();
        self.items.push(v);
        true
    }

    /// Returns `false` if `v` was not present.
    pub fn remove(&mut self, v: usize) -> bool {
        let p = self.pos[v];
        if p == ABSENT {
            return false;
        }
        let last = self.items.pop().expect("nonempty");
        if last != v {
            self.items[p] = last;
            self.pos[last] = p;
        }
        self.pos[v] = ABSENT;
        true
    }

    pub fn get(&self, i: usize) -> usize {
        self.items[i]
    }

    pub fn last(&self) -> Option<usize> {
        self.items.last().copied()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.items.is_empty() {
            None
        } else {
            Some(self.items[rng.random_range(0..self.items.len())])
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().copied()
    }

    pub fn clear(&mut self) {
        for &v in &self.items {
            self.pos[v] = ABSENT;
        }
        self.items.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn agrees_with_btreeset(ops in prop::collection::vec((any::<bool>(), 0usize..20), 0..200)) {
            let mut set = IndexedSet::new(20);
            let mut model = BTreeSet::new();
            for (ins, v) in ops {
                if ins {
                    prop_assert_eq!(set.insert(v), model.insert(v));
                } else {
                    prop_assert_eq!(set.remove(v), model.remove(&v));
                }
                prop_assert_eq!(set.len(), model.len());
            }
            let got: BTreeSet<usize> = set.iter().collect();
            prop_assert_eq!(got, model);
        }
    }
}
