//! Degree-bucket index.
//!
//! Vertices are kept in one array sorted by degree; `start[d]` is the first
//! position holding a vertex of degree at least `d`. Raising a degree by one
//! swaps the vertex to the end of its block and moves the block boundary,
//! so increments, bucket sizes and the minimum degree are all O(1).

use rand::Rng;

#[derive(Debug, Clone)]
pub struct DegreeBuckets {
    degree: Vec<u32>,
    order: Vec<usize>,
    pos: Vec<usize>,
    start: Vec<usize>,
    min: u32,
}

impl DegreeBuckets {
    /// All `n` vertices (ids `1..=n`) at degree 0.
    pub fn new(n: usize) -> Self {
        let mut b = Self {
            degree: Vec::new(),
            order: Vec::new(),
            pos: Vec::new(),
            start: Vec::new(),
            min: 0,
        };
        b.reset(n);
        b
    }

    pub fn reset(&mut self, n: usize) {
        self.degree.clear();
        self.degree.resize(n + 1, 0);
        self.order.clear();
        self.order.extend(1..=n);
        self.pos.clear();
        self.pos.resize(n + 1, 0);
        for (i, &v) in self.order.iter().enumerate() {
            self.pos[v] = i;
        }
        self.start.clear();
        self.start.extend([0, n]);
        self.min = 0;
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree[1..]
    }

    /// Smallest degree with a nonempty bucket.
    pub fn min_nonempty(&self) -> u32 {
        self.min
    }

    pub fn max_degree(&self) -> u32 {
        self.order.last().map_or(0, |&v| self.degree[v])
    }

    /// A vertex of maximum degree.
    pub fn max_vertex(&self) -> usize {
        *self.order.last().expect("at least one vertex")
    }

    fn boundary(&self, d: usize) -> usize {
        self.start.get(d).copied().unwrap_or(self.order.len())
    }

    pub fn count(&self, d: u32) -> usize {
        let d = d as usize;
        self.boundary(d + 1) - self.boundary(d)
    }

    pub fn count_at_or_below(&self, d: u32) -> usize {
        self.boundary(d as usize + 1)
    }

    /// The `i`-th member of bucket `d`, in internal order.
    pub fn member(&self, d: u32, i: usize) -> usize {
        self.order[self.boundary(d as usize) + i]
    }

    pub fn sample<R: Rng + ?Sized>(&self, d: u32, rng: &mut R) -> Option<usize> {
        let c = self.count(d);
        (c > 0).then(|| self.member(d, rng.random_range(0..c)))
    }

    pub fn members(&self, d: u32) -> &[usize] {
        let d = d as usize;
        &self.order[self.boundary(d)..self.boundary(d + 1)]
    }

    /// Raise the degree of `v` by one.
    pub fn increment(&mut self, v: usize) {
        let d = self.degree[v] as usize;
        if self.start.len() < d + 3 {
            self.start.resize(d + 3, self.order.len());
        }
        let last = self.start[d + 1] - 1;
        let p = self.pos[v];
        let w = self.order[last];
        self.order.swap(p, last);
        self.pos[w] = p;
        self.pos[v] = last;
        self.start[d + 1] -= 1;
        self.degree[v] += 1;
        if d as u32 == self.min && self.count(self.min) == 0 {
            self.min += 1;
        }
    }

    /// Compare the index against a full rescan of the degree array.
    pub fn check(&self) -> Result<(), String> {
        let n = self.order.len();
        let mut seen = vec![false; n + 1];
        for (i, &v) in self.order.iter().enumerate() {
            if v == 0 || v > n || seen[v] {
                return Err(format!("order array is not a permutation at position {i}"));
            }
            seen[v] = true;
            if self.pos[v] != i {
                return Err(format!("pos[{v}] = {} but vertex sits at {i}", self.pos[v]));
            }
            let d = self.degree[v] as usize;
            if i < self.boundary(d) || i >= self.boundary(d + 1) {
                return Err(format!("vertex {v} of degree {d} lies outside its bucket"));
            }
        }
        let mut hist = vec![0usize; self.max_degree() as usize + 1];
        for &d in self.degrees() {
            hist[d as usize] += 1;
        }
        for (d, &c) in hist.iter().enumerate() {
            if self.count(d as u32) != c {
                return Err(format!("bucket {d} holds {} vertices, rescan finds {c}", self.count(d as u32)));
            }
        }
        let true_min = self.degrees().iter().copied().min().unwrap_or(0);
        if n > 0 && true_min != self.min {
            return Err(format!("min_nonempty = {} but minimum degree is {true_min}", self.min));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fresh_buckets_hold_everything_at_zero() {
        let b = DegreeBuckets::new(5);
        assert_eq!(b.min_nonempty(), 0);
        assert_eq!(b.count(0), 5);
        assert_eq!(b.count(1), 0);
        assert_eq!(b.count_at_or_below(3), 5);
        b.check().unwrap();
    }

    proptest! {
        #[test]
        fn increments_match_rescan(n in 1usize..30, incs in prop::collection::vec(1usize..30, 0..300)) {
            let mut b = DegreeBuckets::new(n);
            let mut model = vec![0u32; n + 1];
            for v in incs {
                let v = (v - 1) % n + 1;
                b.increment(v);
                model[v] += 1;
                prop_assert!(b.check().is_ok(), "{:?}", b.check());
            }
            prop_assert_eq!(b.degrees(), &model[1..]);
            prop_assert_eq!(b.min_nonempty(), *model[1..].iter().min().unwrap());
        }
    }
}
