//! Simple strategies for the regimes of large `k` or large `l`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hamilton::HamState;
use super::matching::PmState;
use crate::error::{Error, Result};
use crate::process::GraphState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseResult {
    pub phase1_rounds: u64,
    pub total_rounds: u64,
    /// Smallest and largest number of circles on a vertex after phase 1.
    pub circles_after_phase1: (u32, u32),
}

/// Phase 1 places circles on vertices `1, 2, ..., n, 1, 2, ...` for
/// `l * n / 2` rounds; phase 2 puts circles on deficient vertices until the
/// minimum degree is `l`. The square is always the first one offered.
pub fn two_phase_mindeg<R: Rng + ?Sized>(g: &mut GraphState, l: u32, rng: &mut R) -> Result<TwoPhaseResult> {
    if l == 0 {
        return Err(Error::InvalidConfig("l must be at least 1".into()));
    }
    let n = g.n();
    let phase1 = l as u64 * n as u64 / 2;
    let mut circles = vec![0u32; n + 1];
    let mut squares = Vec::with_capacity(g.k());
    for i in 0..phase1 {
        g.draw_squares_into(rng, &mut squares);
        let v = (i % n as u64) as usize + 1;
        circles[v] += 1;
        g.add_edge(squares[0], v);
    }
    let lo = circles[1..].iter().copied().min().unwrap_or(0);
    let hi = circles[1..].iter().copied().max().unwrap_or(0);
    while g.min_degree() < l {
        g.draw_squares_into(rng, &mut squares);
        let v = g.lowest_min_vertex();
        g.add_edge(squares[0], v);
    }
    Ok(TwoPhaseResult {
        phase1_rounds: phase1,
        total_rounds: g.t(),
        circles_after_phase1: (lo, hi),
    })
}

/// Matching-only greedy for `n/2` rounds; returns the number of unsaturated
/// vertices left.
pub fn greedy_pm_large_k<R: Rng + ?Sized>(g: &mut GraphState, rng: &mut R) -> Result<usize> {
    let n = g.n();
    if !n.is_multiple_of(2) {
        return Err(Error::OddVertexCount(n));
    }
    let policy = g.config().square_tie_break;
    let mut pm = PmState::new(n);
    let mut squares = Vec::with_capacity(g.k());
    for _ in 0..n / 2 {
        g.draw_squares_into(rng, &mut squares);
        pm.step_greedy(g, &squares, policy, rng);
    }
    Ok(pm.unsaturated())
}

/// Path-only greedy for `n` rounds; returns the number of vertices left off
/// the path.
pub fn greedy_ham_path<R: Rng + ?Sized>(g: &mut GraphState, rng: &mut R) -> Result<usize> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidConfig(format!("a path needs n >= 2, got {n}")));
    }
    let policy = g.config().square_tie_break;
    let mut h = HamState::new(n);
    let mut squares = Vec::with_capacity(g.k());
    for _ in 0..n {
        g.draw_squares_into(rng, &mut squares);
        h.step_greedy(g, &squares, policy, rng);
    }
    Ok(n - h.path_len())
}
