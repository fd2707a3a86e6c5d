//! Exact hitting-time law for tiny instances.
//!
//! The strategy is replayed as a Markov chain on its full state (capped
//! labelled degrees for minimum degree; mates and green edges for the
//! matching builder). Every `n^k` square tuple and every tie-break or circle
//! choice is enumerated with its probability, in exact rational arithmetic.
//! The chain moves forward in a strict order apart from self-loops, so the
//! expectation follows from one backward sweep.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::hash::Hash;

use super::spec::{Target, TrialSpec};
use crate::error::{Error, Result};
use crate::process::{LoopDegree, TieBreak};
use crate::strategies::StrategyKind;

pub const MAX_N: usize = 8;
const MAX_TUPLES: usize = 1 << 16;
const MAX_STATES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub n: usize,
    pub k: usize,
    pub target: Target,
    pub strategy: StrategyKind,
    pub tie_break: TieBreak,
    pub square_tie_break: TieBreak,
    pub loop_degree: LoopDegree,
    /// Rounds covered by the exact distribution.
    pub horizon: u64,
}

impl OracleSpec {
    pub fn new(n: usize, k: usize, target: Target) -> Self {
        Self::from(&TrialSpec::new(target, n, k, 1, 0))
    }
}

impl From<&TrialSpec> for OracleSpec {
    fn from(s: &TrialSpec) -> Self {
        Self {
            n: s.n,
            k: s.k,
            target: s.target,
            strategy: s.strategy,
            tie_break: s.tie_break,
            square_tie_break: s.square_tie_break,
            loop_degree: s.loop_degree,
            horizon: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub expectation: BigRational,
    /// `P(H = t)` for `t = 1 ..= horizon`.
    pub distribution: Vec<BigRational>,
    /// `P(H > horizon)`.
    pub tail: BigRational,
    pub states: usize,
}

/// Floating-point view of an [`OracleResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub mean: f64,
    /// The expectation as an exact fraction.
    pub exact: String,
    pub distribution: Vec<f64>,
    pub tail: f64,
    pub states: usize,
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl OracleResult {
    pub fn mean(&self) -> f64 {
        to_f64(&self.expectation)
    }

    pub fn report(&self) -> OracleReport {
        OracleReport {
            mean: self.mean(),
            exact: self.expectation.to_string(),
            distribution: self.distribution.iter().map(to_f64).collect(),
            tail: to_f64(&self.tail),
            states: self.states,
        }
    }
}

trait Chain {
    type S: Clone + Eq + Hash;
    fn start(&self) -> Self::S;
    fn done(&self, s: &Self::S) -> bool;
    /// Successor states with their probabilities (merged).
    fn step(&self, s: &Self::S) -> Vec<(Self::S, BigRational)>;
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![1usize; k];
    loop {
        f(&t);
        let mut i = 0;
        while i < k {
            if t[i] < n {
                t[i] += 1;
                break;
            }
            t[i] = 1;
            i += 1;
        }
        if i == k {
            return;
        }
    }
}

/// Square choices among `candidates` (positions into `squares`) with their
/// weights, mirroring the simulator's square tie-break.
fn square_choices(squares: &[usize], candidates: &[usize], policy: TieBreak) -> Vec<(usize, u64, u64)> {
    match policy {
        TieBreak::LowestIndex | TieBreak::AvoidSquareThenLowest => {
            let u = candidates.iter().map(|&i| squares[i]).min().expect("nonempty");
            vec![(u, 1, 1)]
        }
        TieBreak::UniformRandom => candidates.iter().map(|&i| (squares[i], 1, candidates.len() as u64)).collect(),
    }
}

fn merge<S: Eq + Hash>(acc: &mut HashMap<S, BigRational>, s: S, p: BigRational) {
    *acc.entry(s).or_insert_with(BigRational::zero) += p;
}

struct MinDegreeChain {
    n: usize,
    k: usize,
    l: u8,
    uniform_circle: bool,
    tie_break: TieBreak,
    square_tie_break: TieBreak,
    loop_add: u8,
}

impl Chain for MinDegreeChain {
    // capped degrees of vertices 1..=n
    type S = Vec<u8>;

    fn start(&self) -> Vec<u8> {
        vec![0; self.n]
    }

    fn done(&self, s: &Vec<u8>) -> bool {
        s.iter().all(|&d| d >= self.l)
    }

    fn step(&self, s: &Vec<u8>) -> Vec<(Vec<u8>, BigRational)> {
        let n = self.n;
        let deg = |v: usize| s[v - 1];
        let min = *s.iter().min().expect("n >= 1");
        let bucket: Vec<usize> = (1..=n).filter(|&v| deg(v) == min).collect();
        let tuple_p = ratio(1, (n as u64).pow(self.k as u32));
        let mut acc = HashMap::new();
        for_each_tuple(n, self.k, |sq| {
            let best = sq.iter().map(|&u| deg(u)).min().expect("k >= 1");
            let cand: Vec<usize> = (0..sq.len()).filter(|&i| deg(sq[i]) == best).collect();
            for (u, a, b) in square_choices(sq, &cand, self.square_tie_break) {
                let pu = &tuple_p * ratio(a, b);
                let circles: Vec<(usize, u64, u64)> = if self.uniform_circle {
                    (1..=n).map(|v| (v, 1, n as u64)).collect()
                } else {
                    match self.tie_break {
                        TieBreak::LowestIndex => vec![(bucket[0], 1, 1)],
                        TieBreak::AvoidSquareThenLowest => {
                            let v = if bucket[0] != u || bucket.len() == 1 { bucket[0] } else { bucket[1] };
                            vec![(v, 1, 1)]
                        }
                        TieBreak::UniformRandom => bucket.iter().map(|&v| (v, 1, bucket.len() as u64)).collect(),
                    }
                };
                for (v, a, b) in circles {
                    let mut t = s.clone();
                    if u == v {
                        t[u - 1] += self.loop_add;
                    } else {
                        t[u - 1] += 1;
                        t[v - 1] += 1;
                    }
                    for d in t.iter_mut() {
                        *d = (*d).min(self.l);
                    }
                    merge(&mut acc, t, &pu * ratio(a, b));
                }
            }
        });
        acc.into_iter().collect()
    }
}

/// `mate[v - 1]` and `green[v - 1]` (0 for none).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct PmNode {
    mate: Vec<u8>,
    green: Vec<u8>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lab {
    Unsat,
    Red,
    Uncoloured,
    Green,
}

struct MatchingChain {
    n: usize,
    k: usize,
    greedy_only: bool,
    square_tie_break: TieBreak,
}

impl PmNode {
    fn label(&self, v: usize) -> Lab {
        let m = self.mate[v - 1] as usize;
        if m == 0 {
            Lab::Unsat
        } else if self.green[v - 1] != 0 {
            Lab::Green
        } else if self.green[m - 1] != 0 {
            Lab::Red
        } else {
            Lab::Uncoloured
        }
    }

    fn saturate(&mut self, v: usize) {
        for g in self.green.iter_mut() {
            if *g as usize == v {
                *g = 0;
            }
        }
    }

    fn pair(&mut self, a: usize, b: usize) {
        self.mate[a - 1] = b as u8;
        self.mate[b - 1] = a as u8;
    }
}

impl Chain for MatchingChain {
    type S = PmNode;

    fn start(&self) -> PmNode {
        PmNode {
            mate: vec![0; self.n],
            green: vec![0; self.n],
        }
    }

    fn done(&self, s: &PmNode) -> bool {
        s.mate.iter().all(|&m| m != 0)
    }

    fn step(&self, s: &PmNode) -> Vec<(PmNode, BigRational)> {
        let n = self.n;
        let unsat: Vec<usize> = (1..=n).filter(|&v| s.mate[v - 1] == 0).collect();
        let tuple_p = ratio(1, (n as u64).pow(self.k as u32));
        let per_circle = ratio(1, unsat.len() as u64);
        let order: &[Lab] = if self.greedy_only { &[Lab::Unsat] } else { &[Lab::Unsat, Lab::Red, Lab::Uncoloured] };
        let mut acc = HashMap::new();
        for_each_tuple(n, self.k, |sq| {
            let found = order.iter().find_map(|&want| {
                let cand: Vec<usize> = (0..sq.len()).filter(|&i| s.label(sq[i]) == want).collect();
                (!cand.is_empty()).then_some((want, cand))
            });
            let Some((lab, cand)) = found else {
                // pass: a loop changes nothing
                merge(&mut acc, s.clone(), tuple_p.clone());
                return;
            };
            for (u, a, b) in square_choices(sq, &cand, self.square_tie_break) {
                let pu = &tuple_p * ratio(a, b);
                for &v in &unsat {
                    let mut t = s.clone();
                    match lab {
                        Lab::Unsat => {
                            if v != u {
                                t.saturate(u);
                                t.saturate(v);
                                t.pair(u, v);
                            }
                        }
                        Lab::Red => {
                            let x = s.mate[u - 1] as usize;
                            let y = s.green[x - 1] as usize;
                            if v != y {
                                t.green[x - 1] = 0;
                                t.saturate(y);
                                t.saturate(v);
                                t.pair(y, x);
                                t.pair(u, v);
                            }
                        }
                        Lab::Uncoloured => t.green[u - 1] = v as u8,
                        Lab::Green => unreachable!("green squares pass"),
                    }
                    merge(&mut acc, t, &pu * &per_circle);
                }
            }
        });
        acc.into_iter().collect()
    }
}

fn solve_chain<C: Chain>(chain: &C, horizon: u64) -> Result<OracleResult> {
    // enumerate reachable states
    let mut index: HashMap<C::S, usize> = HashMap::new();
    let mut states = vec![chain.start()];
    index.insert(states[0].clone(), 0);
    let mut trans: Vec<Vec<(usize, BigRational)>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        let mut out = Vec::new();
        if !chain.done(&s) {
            for (t, p) in chain.step(&s) {
                let j = *index.entry(t.clone()).or_insert_with(|| {
                    states.push(t);
                    states.len() - 1
                });
                out.push((j, p));
            }
        }
        trans.push(out);
        if states.len() > MAX_STATES {
            return Err(Error::Intractable(format!("more than {MAX_STATES} states")));
        }
        i += 1;
    }
    let m = states.len();

    // reverse topological order, ignoring self-loops
    let mut order = Vec::with_capacity(m);
    let mut mark = vec![0u8; m]; // 0 new, 1 open, 2 finished
    let mut stack = vec![(0usize, 0usize)];
    mark[0] = 1;
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if *next < trans[v].len() {
            let w = trans[v][*next].0;
            *next += 1;
            if w == v {
                continue;
            }
            match mark[w] {
                0 => {
                    mark[w] = 1;
                    stack.push((w, 0));
                }
                1 => return Err(Error::Intractable("the chain revisits a state".into())),
                _ => {}
            }
        } else {
            mark[v] = 2;
            order.push(v);
            stack.pop();
        }
    }

    let mut e = vec![BigRational::zero(); m];
    for &v in &order {
        if trans[v].is_empty() {
            continue;
        }
        let mut stay = BigRational::zero();
        let mut acc = BigRational::one();
        for (w, p) in &trans[v] {
            if *w == v {
                stay += p;
            } else {
                acc += p * &e[*w];
            }
        }
        let leave = BigRational::one() - stay;
        if leave.is_zero() {
            return Err(Error::Intractable("a state never moves on".into()));
        }
        e[v] = acc / leave;
    }

    let mut distribution = Vec::with_capacity(horizon as usize);
    let mut mass: HashMap<usize, BigRational> = HashMap::from([(0, BigRational::one())]);
    if chain.done(&states[0]) {
        mass.clear();
    }
    for _ in 0..horizon {
        let mut next: HashMap<usize, BigRational> = HashMap::new();
        let mut hit = BigRational::zero();
        for (v, p) in &mass {
            for (w, q) in &trans[*v] {
                let pq = p * q;
                if trans[*w].is_empty() {
                    hit += pq;
                } else {
                    merge(&mut next, *w, pq);
                }
            }
        }
        distribution.push(hit);
        mass = next;
    }
    let tail = mass.values().fold(BigRational::zero(), |a, b| a + b);
    Ok(OracleResult {
        expectation: e[0].clone(),
        distribution,
        tail,
        states: m,
    })
}

/// Exact `E[H]` and the law of `H` up to `spec.horizon`. For the matching
/// target `H` counts rounds until the matching is perfect.
pub fn exact_small_oracle(spec: &OracleSpec) -> Result<OracleResult> {
    let (n, k) = (spec.n, spec.k);
    if n == 0 || k == 0 {
        return Err(Error::InvalidConfig("n and k must be at least 1".into()));
    }
    if n > MAX_N {
        return Err(Error::Intractable(format!("n = {n} exceeds {MAX_N}")));
    }
    if (n as f64).powi(k as i32) > MAX_TUPLES as f64 {
        return Err(Error::Intractable(format!("{n}^{k} square tuples per round")));
    }
    if !spec.target.supports(spec.strategy) {
        return Err(Error::InvalidConfig(format!("strategy `{}` does not target `{}`", spec.strategy, spec.target)));
    }
    match spec.target {
        Target::MinDegree(l) => {
            let uniform_circle = match spec.strategy {
                StrategyKind::Greedy => false,
                StrategyKind::UniformCircle => true,
                s => return Err(Error::Intractable(format!("strategy `{s}` is not modelled exactly"))),
            };
            if l > 16 {
                return Err(Error::Intractable(format!("l = {l}")));
            }
            let chain = MinDegreeChain {
                n,
                k,
                l: l as u8,
                uniform_circle,
                tie_break: spec.tie_break,
                square_tie_break: spec.square_tie_break,
                loop_add: match spec.loop_degree {
                    LoopDegree::CountsTwo => 2,
                    LoopDegree::CountsOne => 1,
                },
            };
            solve_chain(&chain, spec.horizon)
        }
        Target::PerfectMatching => {
            if n % 2 != 0 {
                return Err(Error::OddVertexCount(n));
            }
            let chain = MatchingChain {
                n,
                k,
                greedy_only: spec.strategy == StrategyKind::GreedyMatching,
                square_tie_break: spec.square_tie_break,
            };
            solve_chain(&chain, spec.horizon)
        }
        Target::HamiltonCycle => Err(Error::Intractable("the Hamilton-path strategy is not modelled exactly".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(n: usize, k: usize, target: Target) -> BigRational {
        exact_small_oracle(&OracleSpec::new(n, k, target)).unwrap().expectation
    }

    #[test]
    fn hand_checked_values() {
        assert_eq!(exact(4, 1, Target::MinDegree(1)), ratio(5, 2));
        assert_eq!(exact(4, 2, Target::MinDegree(1)), ratio(9, 4));
        assert_eq!(exact(2, 1, Target::PerfectMatching), ratio(2, 1));
        // one vertex: the first loop does it
        assert_eq!(exact(1, 1, Target::MinDegree(1)), ratio(1, 1));
    }

    #[test]
    fn distribution_sums_to_one_with_tail() {
        let r = exact_small_oracle(&OracleSpec::new(4, 1, Target::MinDegree(1))).unwrap();
        assert!(r.distribution[0].is_zero());
        assert_eq!(r.distribution[1], ratio(1, 2));
        let total = r.distribution.iter().fold(r.tail.clone(), |a, b| a + b);
        assert!(total.is_one());
        let mean: BigRational = r.distribution.iter().enumerate().map(|(t, p)| p * BigRational::from_integer(BigInt::from(t + 1))).sum();
        assert!(mean <= r.expectation);
    }

    #[test]
    fn matching_two_vertices_is_geometric() {
        let r = exact_small_oracle(&OracleSpec::new(2, 1, Target::PerfectMatching)).unwrap();
        for (t, p) in r.distribution.iter().take(5).enumerate() {
            assert_eq!(*p, ratio(1, 1 << (t + 1)));
        }
    }

    #[test]
    fn rejects_what_it_cannot_model() {
        assert!(matches!(exact_small_oracle(&OracleSpec::new(9, 1, Target::MinDegree(1))), Err(Error::Intractable(_))));
        assert!(matches!(exact_small_oracle(&OracleSpec::new(4, 1, Target::HamiltonCycle)), Err(Error::Intractable(_))));
        assert!(exact_small_oracle(&OracleSpec::new(3, 1, Target::PerfectMatching)).is_err());
        let mut s = OracleSpec::new(4, 1, Target::MinDegree(1));
        s.strategy = StrategyKind::TwoPhase;
        assert!(exact_small_oracle(&s).is_err());
    }

    #[test]
    fn more_choice_never_hurts() {
        for n in 2..=6 {
            let a = exact(n, 1, Target::MinDegree(2));
            let b = exact(n, 2, Target::MinDegree(2));
            assert!(b <= a, "n = {n}");
        }
    }
}
