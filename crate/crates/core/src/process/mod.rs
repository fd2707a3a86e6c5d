//! The evolving multigraph of the k-process.

mod buckets;

pub use buckets::DegreeBuckets;

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How to break ties where a strategy may choose arbitrarily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Smallest vertex id.
    #[default]
    LowestIndex,
    /// Smallest vertex id other than the selected square, when one exists.
    AvoidSquareThenLowest,
    /// Uniformly among the candidates.
    UniformRandom,
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreak::LowestIndex => "lowest_index",
            TieBreak::AvoidSquareThenLowest => "avoid_square_then_lowest",
            TieBreak::UniformRandom => "uniform_random",
        })
    }
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest_index" | "lowest" => Ok(TieBreak::LowestIndex),
            "avoid_square_then_lowest" | "avoid" => Ok(TieBreak::AvoidSquareThenLowest),
            "uniform_random" | "uniform" => Ok(TieBreak::UniformRandom),
            _ => Err(Error::Parse(format!("unknown tie-break policy `{s}`"))),
        }
    }
}

/// Degree contributed by a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LoopDegree {
    #[default]
    CountsTwo,
    CountsOne,
}

impl FromStr for LoopDegree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counts_two" | "2" => Ok(LoopDegree::CountsTwo),
            "counts_one" | "1" => Ok(LoopDegree::CountsOne),
            _ => Err(Error::Parse(format!("unknown loop-degree policy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessConfig {
    /// Number of vertices; ids run over `1..=n`.
    pub n: usize,
    /// Squares offered per round.
    pub k: usize,
    pub seed: u64,
    /// Policy for the circle endpoint.
    pub tie_break: TieBreak,
    /// Policy for choosing among equally good squares.
    pub square_tie_break: TieBreak,
    pub loop_degree: LoopDegree,
    pub record_edges: bool,
}

impl ProcessConfig {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        Self {
            n,
            k,
            seed,
            tie_break: TieBreak::AvoidSquareThenLowest,
            square_tie_break: TieBreak::LowestIndex,
            loop_degree: LoopDegree::CountsTwo,
            record_edges: false,
        }
    }

    pub fn with_edges(mut self) -> Self {
        self.record_edges = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::InvalidConfig(format!("n = {} is too large", self.n)));
        }
        Ok(())
    }
}

/// One round's edge: square endpoint, circle endpoint, round index (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub square: usize,
    pub circle: usize,
    pub round: u64,
}

#[derive(Debug, Clone)]
pub struct GraphState {
    config: ProcessConfig,
    t: u64,
    buckets: DegreeBuckets,
    edges: Option<Vec<Edge>>,
    // Lowest-id scan for the minimum bucket; every vertex below `cursor`
    // has degree above `cursor_min`.
    cursor: usize,
    cursor_min: u32,
}

impl GraphState {
    pub fn new(config: ProcessConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n;
        let edges = config.record_edges.then(Vec::new);
        Ok(Self {
            config,
            t: 0,
            buckets: DegreeBuckets::new(n),
            edges,
            cursor: 1,
            cursor_min: 0,
        })
    }

    /// Back to the empty graph, keeping allocations.
    pub fn reset(&mut self) {
        self.t = 0;
        self.buckets.reset(self.config.n);
        if let Some(e) = self.edges.as_mut() {
            e.clear();
        }
        self.cursor = 1;
        self.cursor_min = 0;
    }

    pub fn config(&self) -> &ProcessConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    /// Rounds played so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.buckets.degree(v)
    }

    pub fn buckets(&self) -> &DegreeBuckets {
        &self.buckets
    }

    pub fn min_degree(&self) -> u32 {
        self.buckets.min_nonempty()
    }

    /// Number of vertices of degree exactly `d`.
    pub fn count_degree(&self, d: u32) -> usize {
        self.buckets.count(d)
    }

    pub fn edges(&self) -> Option<&[Edge]> {
        self.edges.as_deref()
    }

    /// Draw this round's `k` squares into `out` (uniform on `1..=n`, with
    /// repetition).
    pub fn draw_squares_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        let n = self.config.n;
        out.extend((0..self.config.k).map(|_| rng.random_range(1..=n)));
    }

    pub fn draw_squares<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.config.k);
        self.draw_squares_into(rng, &mut out);
        out
    }

    /// Add the edge `square`–`circle` and advance the round counter.
    pub fn add_edge(&mut self, square: usize, circle: usize) {
        debug_assert!((1..=self.n()).contains(&square) && (1..=self.n()).contains(&circle));
        self.t += 1;
        self.buckets.increment(square);
        if square != circle || self.config.loop_degree == LoopDegree::CountsTwo {
            self.buckets.increment(circle);
        }
        if let Some(e) = self.edges.as_mut() {
            e.push(Edge {
                square,
                circle,
                round: self.t,
            });
        }
    }

    /// Lowest-id vertex of minimum degree. Amortised O(1) over a run since
    /// degrees never decrease.
    pub fn lowest_min_vertex(&mut self) -> usize {
        let min = self.min_degree();
        if min != self.cursor_min {
            self.cursor = 1;
            self.cursor_min = min;
        }
        while self.buckets.degree(self.cursor) != min {
            self.cursor += 1;
        }
        self.cursor
    }

    /// A minimum-degree vertex chosen by `policy`; `square` is the vertex
    /// the player has just selected.
    pub fn min_degree_vertex<R: Rng + ?Sized>(&mut self, policy: TieBreak, square: usize, rng: &mut R) -> usize {
        let min = self.min_degree();
        match policy {
            TieBreak::LowestIndex => self.lowest_min_vertex(),
            TieBreak::AvoidSquareThenLowest => {
                let first = self.lowest_min_vertex();
                if first != square || self.buckets.count(min) == 1 {
                    return first;
                }
                (first + 1..=self.n())
                    .find(|&v| self.buckets.degree(v) == min)
                    .expect("bucket holds a second vertex")
            }
            TieBreak::UniformRandom => self.buckets.sample(min, rng).expect("nonempty minimum bucket"),
        }
    }

    /// Full consistency check against a rescan.
    pub fn validate(&self) -> Result<()> {
        self.buckets.check().map_err(Error::Invariant)?;
        let sum: u64 = self.buckets.degrees().iter().map(|&d| d as u64).sum();
        match self.config.loop_degree {
            LoopDegree::CountsTwo if sum != 2 * self.t => {
                return Err(Error::Invariant(format!("degree sum {sum} != 2t = {}", 2 * self.t)));
            }
            _ => {}
        }
        if let Some(e) = &self.edges {
            if e.len() as u64 != self.t {
                return Err(Error::Invariant(format!("{} recorded edges after {} rounds", e.len(), self.t)));
            }
        }
        Ok(())
    }
}
