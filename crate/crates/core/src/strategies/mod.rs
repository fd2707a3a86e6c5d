//! Player strategies, written as step functions over process state.
//!
//! Each step receives the round's squares, picks one of them and a circle,
//! adds the edge to the [`GraphState`](crate::GraphState) and updates the
//! strategy's own bookkeeping.

pub mod hamilton;
pub mod large_k;
pub mod matching;
pub mod mindeg;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::process::TieBreak;
use rand::Rng;

/// Which case of a strategy's rule fired in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    Greedy,
    Pass,
    A,
    B,
    C,
    /// Case (c) with the red edge ending at an unsaturated vertex.
    CPrime,
    /// Case (c) with the red edge ending at a matched vertex.
    CDoublePrime,
    D,
    E,
}

impl CaseLabel {
    /// Case index used for frequency tables (a=0 ... e=4).
    pub fn index(self) -> usize {
        match self {
            CaseLabel::A | CaseLabel::Greedy => 0,
            CaseLabel::B => 1,
            CaseLabel::C | CaseLabel::CPrime | CaseLabel::CDoublePrime => 2,
            CaseLabel::D => 3,
            CaseLabel::E | CaseLabel::Pass => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// Position of the selected square among the offered ones.
    pub square_index: usize,
    pub square: usize,
    pub circle: usize,
    pub case: CaseLabel,
    /// The tracked structure (matching, path, degree target) grew.
    pub progressed: bool,
}

/// Strategy names accepted by the harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Minimum-degree square, minimum-degree circle.
    Greedy,
    /// Minimum-degree square, uniformly random circle.
    UniformCircle,
    /// Minimum-degree square, circle on a maximum-degree vertex.
    MaxDegreeCircle,
    /// Sequential circles for `ln/2` rounds, then deficit repair.
    TwoPhase,
    /// Red/green augmenting-path matching builder.
    Matching,
    /// Extend the matching whenever a square is unsaturated, otherwise pass.
    GreedyMatching,
    /// Path builder with red/green/useless/permissible colouring.
    Hamilton,
    /// Extend the path whenever a square is off the path, otherwise pass.
    GreedyPath,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Greedy => "greedy",
            StrategyKind::UniformCircle => "uniform_circle",
            StrategyKind::MaxDegreeCircle => "max_degree_circle",
            StrategyKind::TwoPhase => "two_phase",
            StrategyKind::Matching => "matching",
            StrategyKind::GreedyMatching => "greedy_matching",
            StrategyKind::Hamilton => "hamilton",
            StrategyKind::GreedyPath => "greedy_path",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "greedy" | "s0" => StrategyKind::Greedy,
            "uniform_circle" | "uniform-random-circle" => StrategyKind::UniformCircle,
            "max_degree_circle" => StrategyKind::MaxDegreeCircle,
            "two_phase" => StrategyKind::TwoPhase,
            "matching" | "pm" => StrategyKind::Matching,
            "greedy_matching" => StrategyKind::GreedyMatching,
            "hamilton" | "ham" => StrategyKind::Hamilton,
            "greedy_path" => StrategyKind::GreedyPath,
            _ => return Err(Error::Parse(format!("unknown strategy `{s}`"))),
        })
    }
}

/// Per-run instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Record a trajectory sample every `stride` rounds.
    pub stride: Option<u64>,
    /// Run the full invariant check after every round.
    pub validate: bool,
}

/// Pick among candidate squares. `candidates` holds positions into
/// `squares`; ties are broken by `policy`.
pub(crate) fn pick_square<R: Rng + ?Sized>(
    squares: &[usize],
    candidates: impl Iterator<Item = usize> + Clone,
    policy: TieBreak,
    rng: &mut R,
) -> Option<usize> {
    match policy {
        TieBreak::LowestIndex | TieBreak::AvoidSquareThenLowest => candidates.min_by_key(|&i| (squares[i], i)),
        TieBreak::UniformRandom => {
            let c = candidates.clone().count();
            if c == 0 {
                None
            } else {
                candidates.clone().nth(rng.random_range(0..c))
            }
        }
    }
}

/// `a^k - b^k` for `0 <= b <= a <= 1`, without cancellation when `a - b`
/// is small.
pub fn pow_diff(a: f64, b: f64, k: u32) -> f64 {
    let diff = a - b;
    if diff.abs() > 0.25 {
        return a.powi(k as i32) - b.powi(k as i32);
    }
    // a^k - b^k = (a - b) * sum_{i<k} a^i b^(k-1-i), summed by Horner in b
    let mut sum = 0.0;
    let mut ap = 1.0;
    for _ in 0..k {
        sum = sum * b + ap;
        ap *= a;
    }
    diff * sum
}
