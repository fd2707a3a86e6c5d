//! Minimum-degree strategies.
//!
//! The greedy rule takes a square of smallest degree among the `k` offered
//! and puts the circle on a vertex of minimum degree. It is optimal for the
//! property "minimum degree at least `l`"; the two alternative circle rules
//! here exist as baselines for the dominance experiment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{pick_square, CaseLabel, RunOptions, StepOutcome, StrategyKind};
use crate::error::{Error, Result};
use crate::process::GraphState;

/// Circle rule for a minimum-degree strategy. The square is always a
/// minimum-degree one among those offered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleRule {
    MinDegree,
    Uniform,
    MaxDegree,
}

impl CircleRule {
    pub fn from_kind(kind: StrategyKind) -> Result<Self> {
        match kind {
            StrategyKind::Greedy => Ok(CircleRule::MinDegree),
            StrategyKind::UniformCircle => Ok(CircleRule::Uniform),
            StrategyKind::MaxDegreeCircle => Ok(CircleRule::MaxDegree),
            other => Err(Error::InvalidConfig(format!("`{other}` is not a minimum-degree step rule"))),
        }
    }
}

/// Play one round: choose the square and circle and add the edge.
pub fn mindeg_step<R: Rng + ?Sized>(g: &mut GraphState, squares: &[usize], rule: CircleRule, rng: &mut R) -> StepOutcome {
    let best = squares.iter().map(|&u| g.degree(u)).min().expect("at least one square");
    let policy = g.config().square_tie_break;
    let i = pick_square(squares, (0..squares.len()).filter(|&i| g.degree(squares[i]) == best), policy, rng)
        .expect("some square attains the minimum");
    let u = squares[i];
    let before = g.min_degree();
    let v = match rule {
        CircleRule::MinDegree => {
            let policy = g.config().tie_break;
            g.min_degree_vertex(policy, u, rng)
        }
        CircleRule::Uniform => rng.random_range(1..=g.n()),
        CircleRule::MaxDegree => g.buckets().max_vertex(),
    };
    g.add_edge(u, v);
    StepOutcome {
        square_index: i,
        square: u,
        circle: v,
        case: CaseLabel::Greedy,
        progressed: g.min_degree() > before,
    }
}

fn check_counts(counts: &[f64], n: f64) -> Result<()> {
    if counts.iter().any(|&y| y < 0.0 || !y.is_finite()) {
        return Err(Error::InvalidCounts(format!("negative or non-finite degree counts {counts:?}")));
    }
    let total: f64 = counts.iter().sum();
    if total > n * (1.0 + 1e-12) {
        return Err(Error::InvalidCounts(format!("counts sum to {total} > n = {n}")));
    }
    Ok(())
}

/// Probability that the selected square has degree `j`, for
/// `j = q..q + counts.len()`, given `counts[i] = Y_{q+i}` vertices of degree
/// `q + i` and every other vertex of degree at least `q + counts.len()`.
pub fn case_probabilities_mindeg(counts: &[f64], n: f64, k: u32) -> Result<Vec<f64>> {
    check_counts(counts, n)?;
    // P(all squares on degree >= j) = (1 - sum_{a<j} Y_a / n)^k
    let mut above = 1.0f64;
    let mut out = Vec::with_capacity(counts.len());
    for &y in counts {
        let next = (above - y / n).clamp(0.0, 1.0);
        out.push(above.powi(k as i32) - next.powi(k as i32));
        above = next;
    }
    Ok(out)
}

/// Leading-order expected one-round change of `Y_q..Y_{l-1}` under the
/// greedy rule during the phase whose minimum degree is `q`.
pub fn min_degree_trend(counts: &[f64], n: f64, k: u32) -> Result<Vec<f64>> {
    let p = case_probabilities_mindeg(counts, n, k)?;
    Ok((0..counts.len())
        .map(|j| {
            let mut d = -p[j];
            if j == 0 {
                d -= 1.0;
            } else {
                d += p[j - 1];
            }
            if j == 1 {
                d += 1.0;
            }
            d
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSample {
    pub t: u64,
    /// `Y_0 .. Y_{l-1}` at round `t`.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDegreeTrace {
    pub hitting_round: u64,
    /// `breakpoints[q]` is the round at which the minimum degree first
    /// exceeded `q`.
    pub breakpoints: Vec<u64>,
    pub samples: Vec<DegreeSample>,
}

fn degree_sample(g: &GraphState, l: u32) -> DegreeSample {
    DegreeSample {
        t: g.t(),
        counts: (0..l).map(|d| g.count_degree(d)).collect(),
    }
}

/// Play `rule` from the current state until the minimum degree reaches `l`.
pub fn run_min_degree<R: Rng + ?Sized>(
    g: &mut GraphState,
    rule: CircleRule,
    l: u32,
    rng: &mut R,
    opts: RunOptions,
) -> Result<MinDegreeTrace> {
    let mut breakpoints = vec![0u64; l as usize];
    let mut samples = Vec::new();
    let mut squares = Vec::with_capacity(g.k());
    if let Some(stride) = opts.stride {
        if g.t().is_multiple_of(stride.max(1)) {
            samples.push(degree_sample(g, l));
        }
    }
    while g.min_degree() < l {
        let before = g.min_degree();
        g.draw_squares_into(rng, &mut squares);
        mindeg_step(g, &squares, rule, rng);
        let after = g.min_degree();
        for q in before..after.min(l) {
            breakpoints[q as usize] = g.t();
        }
        if opts.validate {
            g.validate()?;
        }
        if let Some(stride) = opts.stride {
            if g.t().is_multiple_of(stride.max(1)) {
                samples.push(degree_sample(g, l));
            }
        }
    }
    Ok(MinDegreeTrace {
        hitting_round: g.t(),
        breakpoints,
        samples,
    })
}
