//! Perfect-matching builder.
//!
//! The strategy grows a partial matching `M`. A matched vertex `b` may carry
//! a green edge to an unsaturated vertex `a`; `b` is then green and its mate
//! `c` red, so a later square on `c` closes the augmenting path `a b c d`.
//! Each round performs the first applicable case:
//!
//! * (a) a square is unsaturated: match it to a uniform unsaturated vertex;
//! * (b) a square is red: augment through its green mate;
//! * (c) a square is matched and uncoloured: colour a new green edge;
//! * (d) every square is green: pass.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::{pick_square, pow_diff, CaseLabel, RunOptions, StepOutcome};
use crate::error::{Error, Result};
use crate::indexed_set::IndexedSet;
use crate::process::{GraphState, ProcessConfig, TieBreak};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PmLabel {
    Unsat,
    Uncoloured,
    Red,
    Green,
}

#[derive(Debug, Clone)]
pub struct PmState {
    n: usize,
    label: Vec<PmLabel>,
    mate: Vec<usize>,
    green_partner: Vec<usize>,
    // green vertices whose green edge ends at a given unsaturated vertex
    greens_at: Vec<Vec<usize>>,
    unsat: IndexedSet,
    red: usize,
}

impl PmState {
    pub fn new(n: usize) -> Self {
        let mut s = Self {
            n,
            label: Vec::new(),
            mate: Vec::new(),
            green_partner: Vec::new(),
            greens_at: vec![Vec::new(); n + 1],
            unsat: IndexedSet::new(n + 1),
            red: 0,
        };
        s.reset();
        s
    }

    pub fn reset(&mut self) {
        let n = self.n;
        self.label.clear();
        self.label.resize(n + 1, PmLabel::Unsat);
        self.mate.clear();
        self.mate.resize(n + 1, 0);
        self.green_partner.clear();
        self.green_partner.resize(n + 1, 0);
        for g in &mut self.greens_at {
            g.clear();
        }
        self.unsat.clear();
        for v in 1..=n {
            self.unsat.insert(v);
        }
        self.red = 0;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, v: usize) -> PmLabel {
        self.label[v]
    }

    /// Matching partner, or `None` for an unsaturated vertex.
    pub fn mate(&self, v: usize) -> Option<usize> {
        (self.mate[v] != 0).then_some(self.mate[v])
    }

    pub fn green_partner(&self, v: usize) -> Option<usize> {
        (self.green_partner[v] != 0).then_some(self.green_partner[v])
    }

    /// Saturated vertices `X`.
    pub fn saturated(&self) -> usize {
        self.n - self.unsat.len()
    }

    /// Unsaturated vertices `U = n - X`.
    pub fn unsaturated(&self) -> usize {
        self.unsat.len()
    }

    /// Red vertices `R` (equal to the number of green vertices and edges).
    pub fn red(&self) -> usize {
        self.red
    }

    pub fn is_perfect(&self) -> bool {
        self.unsat.is_empty()
    }

    fn uncolour_pair(&mut self, g: usize) {
        // g is green; its mate is red.
        let partner = self.green_partner[g];
        if let Some(p) = self.greens_at[partner].iter().position(|&x| x == g) {
            self.greens_at[partner].swap_remove(p);
        }
        self.green_partner[g] = 0;
        self.label[g] = PmLabel::Uncoloured;
        self.label[self.mate[g]] = PmLabel::Uncoloured;
        self.red -= 1;
    }

    /// `v` leaves the unsaturated set: drop every green edge ending there.
    fn saturate(&mut self, v: usize) {
        self.unsat.remove(v);
        let greens = std::mem::take(&mut self.greens_at[v]);
        for &g in &greens {
            self.green_partner[g] = 0;
            self.label[g] = PmLabel::Uncoloured;
            self.label[self.mate[g]] = PmLabel::Uncoloured;
            self.red -= 1;
        }
        let mut greens = greens;
        greens.clear();
        self.greens_at[v] = greens;
    }

    fn match_pair(&mut self, a: usize, b: usize) {
        self.mate[a] = b;
        self.mate[b] = a;
        self.label[a] = PmLabel::Uncoloured;
        self.label[b] = PmLabel::Uncoloured;
    }

    /// The case a round with these squares falls into.
    pub fn case_for(&self, squares: &[usize]) -> CaseLabel {
        let has = |l: PmLabel| squares.iter().any(|&u| self.label[u] == l);
        if has(PmLabel::Unsat) {
            CaseLabel::A
        } else if has(PmLabel::Red) {
            CaseLabel::B
        } else if has(PmLabel::Uncoloured) {
            CaseLabel::C
        } else {
            CaseLabel::D
        }
    }

    /// Apply one round for the given squares. Adds the edge to `g`.
    pub fn step<R: Rng + ?Sized>(&mut self, g: &mut GraphState, squares: &[usize], policy: TieBreak, rng: &mut R) -> StepOutcome {
        let expected = self.case_for(squares);
        let out = self.apply(g, squares, policy, rng);
        debug_assert_eq!(out.case, expected);
        out
    }

    fn apply<R: Rng + ?Sized>(&mut self, g: &mut GraphState, squares: &[usize], policy: TieBreak, rng: &mut R) -> StepOutcome {
        let choose = |want: PmLabel, rng: &mut R| {
            pick_square(squares, (0..squares.len()).filter(|&i| self.label[squares[i]] == want), policy, rng)
        };
        if let Some(i) = choose(PmLabel::Unsat, rng) {
            let u = squares[i];
            let v = self.unsat.sample(rng).expect("u is unsaturated");
            g.add_edge(u, v);
            let progressed = v != u;
            if progressed {
                self.saturate(u);
                self.saturate(v);
                self.match_pair(u, v);
            }
            return StepOutcome {
                square_index: i,
                square: u,
                circle: v,
                case: CaseLabel::A,
                progressed,
            };
        }
        if let Some(i) = choose(PmLabel::Red, rng) {
            let u = squares[i];
            let x = self.mate[u];
            let y = self.green_partner[x];
            let v = self.unsat.sample(rng).expect("y is unsaturated");
            g.add_edge(u, v);
            let progressed = v != y;
            if progressed {
                // augment along y - x - u - v
                self.uncolour_pair(x);
                self.saturate(y);
                self.saturate(v);
                self.match_pair(y, x);
                self.match_pair(u, v);
            }
            return StepOutcome {
                square_index: i,
                square: u,
                circle: v,
                case: CaseLabel::B,
                progressed,
            };
        }
        if let Some(i) = choose(PmLabel::Uncoloured, rng) {
            let u = squares[i];
            let v = self.unsat.sample(rng).expect("matching is not perfect");
            g.add_edge(u, v);
            self.label[u] = PmLabel::Green;
            self.label[self.mate[u]] = PmLabel::Red;
            self.green_partner[u] = v;
            self.greens_at[v].push(u);
            self.red += 1;
            return StepOutcome {
                square_index: i,
                square: u,
                circle: v,
                case: CaseLabel::C,
                progressed: false,
            };
        }
        let u = squares[0];
        g.add_edge(u, u);
        StepOutcome {
            square_index: 0,
            square: u,
            circle: u,
            case: CaseLabel::D,
            progressed: false,
        }
    }

    /// Matching-only greedy: extend on an unsaturated square, else pass.
    pub fn step_greedy<R: Rng + ?Sized>(&mut self, g: &mut GraphState, squares: &[usize], policy: TieBreak, rng: &mut R) -> StepOutcome {
        let pick = pick_square(squares, (0..squares.len()).filter(|&i| self.label[squares[i]] == PmLabel::Unsat), policy, rng);
        match pick {
            Some(i) => {
                let u = squares[i];
                let v = self.unsat.sample(rng).expect("u is unsaturated");
                g.add_edge(u, v);
                if v != u {
                    self.saturate(u);
                    self.saturate(v);
                    self.match_pair(u, v);
                }
                StepOutcome {
                    square_index: i,
                    square: u,
                    circle: v,
                    case: CaseLabel::Greedy,
                    progressed: v != u,
                }
            }
            None => {
                let u = squares[0];
                g.add_edge(u, u);
                StepOutcome {
                    square_index: 0,
                    square: u,
                    circle: u,
                    case: CaseLabel::Pass,
                    progressed: false,
                }
            }
        }
    }

    /// Full bookkeeping check.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invariant(m));
        let (mut reds, mut greens, mut unsat) = (0, 0, 0);
        for v in 1..=self.n {
            match self.label[v] {
                PmLabel::Unsat => {
                    unsat += 1;
                    if self.mate[v] != 0 || !self.unsat.contains(v) {
                        return bad(format!("unsaturated {v} has a mate or is missing from U"));
                    }
                    for &gv in &self.greens_at[v] {
                        if self.green_partner[gv] != v || self.label[gv] != PmLabel::Green {
                            return bad(format!("stale green edge {gv} -> {v}"));
                        }
                    }
                }
                lab => {
                    let m = self.mate[v];
                    if m == 0 || m == v || self.mate[m] != v {
                        return bad(format!("mate map is not an involution at {v}"));
                    }
                    if self.unsat.contains(v) {
                        return bad(format!("matched {v} listed as unsaturated"));
                    }
                    let expected = match lab {
                        PmLabel::Red => PmLabel::Green,
                        PmLabel::Green => PmLabel::Red,
                        _ => PmLabel::Uncoloured,
                    };
                    if self.label[m] != expected {
                        return bad(format!("{v} is {lab:?} but its mate {m} is {:?}", self.label[m]));
                    }
                    if lab == PmLabel::Green {
                        greens += 1;
                        let p = self.green_partner[v];
                        if p == 0 || self.label[p] != PmLabel::Unsat || !self.greens_at[p].contains(&v) {
                            return bad(format!("green {v} points to {p}, which is not an indexed unsaturated vertex"));
                        }
                    } else if self.green_partner[v] != 0 {
                        return bad(format!("non-green {v} keeps a green partner"));
                    }
                    if lab == PmLabel::Red {
                        reds += 1;
                    }
                }
            }
        }
        if reds != greens || reds != self.red {
            return bad(format!("red {reds}, green {greens}, counter {}", self.red));
        }
        if unsat != self.unsat.len() {
            return bad(format!("U counts {unsat} vs set size {}", self.unsat.len()));
        }
        if !(self.n - unsat).is_multiple_of(2) {
            return bad("odd number of saturated vertices".into());
        }
        Ok(())
    }

    /// Check the matching against the graph's recorded edges.
    pub fn verify_in_graph(&self, g: &GraphState) -> Result<()> {
        let Some(edges) = g.edges() else {
            return Ok(());
        };
        let set: HashSet<(usize, usize)> = edges.iter().map(|e| (e.square.min(e.circle), e.square.max(e.circle))).collect();
        for v in 1..=self.n {
            if let Some(m) = self.mate(v) {
                if !set.contains(&(v.min(m), v.max(m))) {
                    return Err(Error::Invariant(format!("matching edge {v}-{m} is not in the graph")));
                }
            }
        }
        Ok(())
    }
}

fn check_pm_counts(x: f64, r: f64, n: f64) -> Result<()> {
    if !(0.0..=n).contains(&x) || r < 0.0 || 2.0 * r > x + 1e-9 {
        return Err(Error::InvalidCounts(format!("need 0 <= 2R <= X <= n, got X = {x}, R = {r}, n = {n}")));
    }
    Ok(())
}

/// Case probabilities `(P_a, P_b, P_c, P_d)` at `X` saturated and `R` red
/// vertices.
pub fn pm_case_probabilities(x: f64, r: f64, n: f64, k: u32) -> Result<[f64; 4]> {
    check_pm_counts(x, r, n)?;
    let (xs, xr, rs) = (x / n, (x - r) / n, r / n);
    let ki = k as i32;
    Ok([1.0 - xs.powi(ki), pow_diff(xs, xr, k), pow_diff(xr, rs, k), rs.powi(ki)])
}

/// Leading-order expected one-round change `(E dX, E dR)`.
pub fn pm_trend(x: f64, r: f64, n: f64, k: u32) -> Result<(f64, f64)> {
    let [pa, pb, pc, _] = pm_case_probabilities(x, r, n, k)?;
    let dx = 2.0 * (pa + pb);
    let dr = -(pa + pb) * 2.0 * r / (n - x) - pb + pc;
    Ok((dx, dr))
}

/// Exact `E[X(t+1) - X(t)]`, including the no-op draws.
pub fn pm_exact_dx(x: f64, r: f64, n: f64, k: u32) -> Result<f64> {
    let [pa, pb, _, _] = pm_case_probabilities(x, r, n, k)?;
    let u = n - x;
    Ok(if u > 0.0 { 2.0 * (pa + pb) * (1.0 - 1.0 / u) } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmSample {
    pub t: u64,
    pub saturated: usize,
    pub red: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmTrace {
    /// First round with at most `eps_stop * n` unsaturated vertices.
    pub threshold_round: u64,
    /// Extra rounds spent completing the matching.
    pub completion_rounds: u64,
    pub samples: Vec<PmSample>,
    /// `mate[v - 1]` for the final perfect matching.
    pub matching: Vec<usize>,
}

impl PmTrace {
    pub fn total_rounds(&self) -> u64 {
        self.threshold_round + self.completion_rounds
    }
}

fn pm_sample(pm: &PmState, g: &GraphState) -> PmSample {
    PmSample {
        t: g.t(),
        saturated: pm.saturated(),
        red: pm.red(),
    }
}

/// Keep stepping until the matching is perfect; returns the extra rounds.
pub fn pm_completion<R: Rng + ?Sized>(pm: &mut PmState, g: &mut GraphState, rng: &mut R, opts: RunOptions) -> Result<u64> {
    let start = g.t();
    let policy = g.config().square_tie_break;
    let mut squares = Vec::with_capacity(g.k());
    while !pm.is_perfect() {
        g.draw_squares_into(rng, &mut squares);
        pm.step(g, &squares, policy, rng);
        if opts.validate {
            pm.validate()?;
            g.validate()?;
        }
    }
    Ok(g.t() - start)
}

/// Run the matching strategy until at most `eps_stop * n` vertices are
/// unsaturated, then complete the matching.
pub fn pm_run<R: Rng + ?Sized>(g: &mut GraphState, pm: &mut PmState, eps_stop: f64, rng: &mut R, opts: RunOptions) -> Result<PmTrace> {
    let n = g.n();
    if !n.is_multiple_of(2) {
        return Err(Error::OddVertexCount(n));
    }
    if !(0.0..1.0).contains(&eps_stop) {
        return Err(Error::InvalidConfig(format!("eps_stop = {eps_stop} must lie in [0, 1)")));
    }
    let policy = g.config().square_tie_break;
    let limit = eps_stop * n as f64;
    let mut samples = Vec::new();
    let stride = opts.stride.map(|s| s.max(1));
    if stride.is_some() {
        samples.push(pm_sample(pm, g));
    }
    let mut squares = Vec::with_capacity(g.k());
    while pm.unsaturated() as f64 > limit {
        g.draw_squares_into(rng, &mut squares);
        pm.step(g, &squares, policy, rng);
        if opts.validate {
            pm.validate()?;
            g.validate()?;
        }
        if let Some(s) = stride {
            if g.t().is_multiple_of(s) {
                samples.push(pm_sample(pm, g));
            }
        }
    }
    let threshold_round = g.t();
    let completion_rounds = pm_completion(pm, g, rng, opts)?;
    pm.validate()?;
    pm.verify_in_graph(g)?;
    Ok(PmTrace {
        threshold_round,
        completion_rounds,
        samples,
        matching: (1..=n).map(|v| pm.mate[v]).collect(),
    })
}

/// Convenience wrapper building fresh state from a configuration.
pub fn pm_run_config<R: Rng + ?Sized>(config: ProcessConfig, eps_stop: f64, rng: &mut R, opts: RunOptions) -> Result<PmTrace> {
    let mut g = GraphState::new(config)?;
    let mut pm = PmState::new(g.n());
    pm_run(&mut g, &mut pm, eps_stop, rng, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn fresh(n: usize, k: usize) -> (GraphState, PmState) {
        let g = GraphState::new(ProcessConfig::new(n, k, 0).with_edges()).unwrap();
        (g, PmState::new(n))
    }

    #[test]
    fn probabilities_at_corners() {
        assert_eq!(pm_case_probabilities(0.0, 0.0, 8.0, 2).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(pm_case_probabilities(8.0, 0.0, 8.0, 2).unwrap(), [0.0, 0.0, 1.0, 0.0]);
        assert!(pm_case_probabilities(4.0, 3.0, 8.0, 2).is_err());
    }

    #[test]
    fn probabilities_arithmetic() {
        // X = n/2, R = n/8, n = 8, k = 2
        let p = pm_case_probabilities(4.0, 1.0, 8.0, 2).unwrap();
        let want = [0.75, 7.0 / 64.0, 8.0 / 64.0, 1.0 / 64.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn saturated_uncoloured_square_colours_green() {
        let (mut g, mut pm) = fresh(4, 1);
        let mut rng = trial_rng(0, 0);
        // match 1-2 by hand through case (a)
        pm.saturate(1);
        pm.saturate(2);
        pm.match_pair(1, 2);
        pm.validate().unwrap();
        let out = pm.step(&mut g, &[1], TieBreak::LowestIndex, &mut rng);
        assert_eq!(out.case, CaseLabel::C);
        assert_eq!(pm.label(1), PmLabel::Green);
        assert_eq!(pm.label(2), PmLabel::Red);
        assert_eq!(pm.red(), 1);
        pm.validate().unwrap();
    }

    #[test]
    fn final_augmentation_through_red() {
        // n = 4, X = 2, R = 1: 1-2 matched, 1 green towards 3, square on red 2.
        let (g, mut pm) = fresh(4, 1);
        pm.saturate(1);
        pm.saturate(2);
        pm.match_pair(1, 2);
        pm.label[1] = PmLabel::Green;
        pm.label[2] = PmLabel::Red;
        pm.green_partner[1] = 3;
        pm.greens_at[3].push(1);
        pm.red = 1;
        pm.validate().unwrap();
        // the circle is uniform over U = {3, 4}; retry seeds until it is 4
        for seed in 0.. {
            let mut trial = pm.clone();
            let mut gg = g.clone();
            let mut rng = trial_rng(seed, 0);
            let out = trial.step(&mut gg, &[2], TieBreak::LowestIndex, &mut rng);
            assert_eq!(out.case, CaseLabel::B);
            if out.circle == 4 {
                assert!(trial.is_perfect());
                assert_eq!(trial.mate(3), Some(1));
                assert_eq!(trial.mate(2), Some(4));
                assert_eq!(trial.red(), 0);
                trial.validate().unwrap();
                break;
            } else {
                assert!(!out.progressed);
                assert_eq!(trial.saturated(), 2);
            }
        }
    }

    #[test]
    fn all_green_squares_pass() {
        let (mut g, mut pm) = fresh(4, 2);
        pm.saturate(1);
        pm.saturate(2);
        pm.match_pair(1, 2);
        pm.label[1] = PmLabel::Green;
        pm.label[2] = PmLabel::Red;
        pm.green_partner[1] = 3;
        pm.greens_at[3].push(1);
        pm.red = 1;
        let mut rng = trial_rng(0, 0);
        let out = pm.step(&mut g, &[1, 1], TieBreak::LowestIndex, &mut rng);
        assert_eq!(out.case, CaseLabel::D);
    }

    #[test]
    fn odd_n_is_rejected() {
        let mut rng = trial_rng(0, 0);
        assert!(matches!(
            pm_run_config(ProcessConfig::new(5, 1, 0), 0.0, &mut rng, RunOptions::default()),
            Err(Error::OddVertexCount(5))
        ));
    }

    #[test]
    fn completion_from_perfect_takes_nothing() {
        let (mut g, mut pm) = fresh(2, 1);
        pm.saturate(1);
        pm.saturate(2);
        pm.match_pair(1, 2);
        let mut rng = trial_rng(0, 0);
        assert_eq!(pm_completion(&mut pm, &mut g, &mut rng, RunOptions::default()).unwrap(), 0);
    }

    #[test]
    fn validated_runs_produce_perfect_matchings() {
        for k in 1..=3 {
            let mut rng = trial_rng(17, k as u64);
            let opts = RunOptions {
                stride: Some(25),
                validate: true,
            };
            let tr = pm_run_config(ProcessConfig::new(400, k, 17).with_edges(), 0.01, &mut rng, opts).unwrap();
            for (i, &m) in tr.matching.iter().enumerate() {
                assert_ne!(m, 0);
                assert_eq!(tr.matching[m - 1], i + 1);
            }
            assert!(tr.threshold_round >= 198);
            assert!(tr.samples.windows(2).all(|w| w[0].saturated <= w[1].saturated));
        }
    }

    #[test]
    fn empirical_drift_matches_formula() {
        // Advance a run to a mid-process state, then resample one step.
        let n = 1000;
        let k = 2;
        let (mut g, mut pm) = fresh(n, k);
        let mut rng = trial_rng(8, 0);
        let mut squares = Vec::new();
        while pm.saturated() < n / 2 || pm.red() < 10 {
            g.draw_squares_into(&mut rng, &mut squares);
            pm.step(&mut g, &squares, TieBreak::LowestIndex, &mut rng);
            assert!(!pm.is_perfect());
        }
        let (x, r) = (pm.saturated() as f64, pm.red() as f64);
        let reps = 100_000;
        let mut scratch = GraphState::new(ProcessConfig::new(n, k, 0)).unwrap();
        let (mut sx, mut sxx, mut sr, mut srr) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..reps {
            let mut s = pm.clone();
            scratch.draw_squares_into(&mut rng, &mut squares);
            s.step(&mut scratch, &squares, TieBreak::LowestIndex, &mut rng);
            let dx = s.saturated() as f64 - x;
            let dr = s.red() as f64 - r;
            sx += dx;
            sxx += dx * dx;
            sr += dr;
            srr += dr * dr;
        }
        let m = reps as f64;
        let (mx, mr) = (sx / m, sr / m);
        let sdx = ((sxx / m - mx * mx) / m).sqrt();
        let sdr = ((srr / m - mr * mr) / m).sqrt();
        let exact = pm_exact_dx(x, r, n as f64, k as u32).unwrap();
        assert!((mx - exact).abs() < 3.0 * sdx, "mean {mx} exact {exact} sd {sdx}");
        let (lead_x, lead_r) = pm_trend(x, r, n as f64, k as u32).unwrap();
        let u = n as f64 - x;
        assert!((exact - lead_x).abs() <= 2.0 / u + 1e-12);
        // the leading R trend ignores O(1/U) terms
        assert!((mr - lead_r).abs() < 4.0 * sdr + 4.0 / u, "mean {mr} trend {lead_r} sd {sdr}");
    }
}
