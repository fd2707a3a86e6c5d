//! Hamilton-cycle builder.
//!
//! A path `P` is grown through [n]. Off-path vertices are either matched
//! (paired by a matching built in case (a)) or unsaturated. A path vertex is
//! red when it carries one red edge to an off-path vertex; its path
//! neighbours are green, and a square on a green vertex splices the red
//! edge's far end into the path. Vertices at path distance 2 from a red
//! vertex that are not green are useless, and the useless set is padded up
//! to `2R` so that the remaining permissible vertices can become red without
//! breaking the distance-3 separation of red vertices.
//!
//! Rounds take the first applicable case: (a) unsaturated square,
//! (b) matched square, (c) green square, (d) permissible square, (e) pass.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::{pick_square, pow_diff, CaseLabel, RunOptions, StepOutcome};
use crate::error::{Error, Result};
use crate::indexed_set::IndexedSet;
use crate::process::{GraphState, ProcessConfig, TieBreak};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HamLabel {
    Red,
    Green,
    Useless,
    Permissible,
    Matched,
    Unsat,
}

impl HamLabel {
    fn slot(self) -> usize {
        self as usize
    }

    pub fn on_path(self) -> bool {
        matches!(self, HamLabel::Red | HamLabel::Green | HamLabel::Useless | HamLabel::Permissible)
    }
}

/// Label forced by the distance to the nearest red vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Natural {
    Red,
    Green,
    Useless,
    Free,
}

#[derive(Debug, Clone)]
pub struct HamState {
    n: usize,
    label: Vec<HamLabel>,
    counts: [usize; 6],
    prev: Vec<usize>,
    next: Vec<usize>,
    head: usize,
    tail: usize,
    red_edge: Vec<usize>,
    reds_at: Vec<Vec<usize>>,
    mate: Vec<usize>,
    unsat: IndexedSet,
    off_path: IndexedSet,
    permissible: IndexedSet,
    padding: IndexedSet,
    touched: Vec<usize>,
}

impl HamState {
    pub fn new(n: usize) -> Self {
        let mut s = Self {
            n,
            label: Vec::new(),
            counts: [0; 6],
            prev: Vec::new(),
            next: Vec::new(),
            head: 0,
            tail: 0,
            red_edge: Vec::new(),
            reds_at: vec![Vec::new(); n + 1],
            mate: Vec::new(),
            unsat: IndexedSet::new(n + 1),
            off_path: IndexedSet::new(n + 1),
            permissible: IndexedSet::new(n + 1),
            padding: IndexedSet::new(n + 1),
            touched: Vec::new(),
        };
        s.reset();
        s
    }

    pub fn reset(&mut self) {
        let n = self.n;
        for v in [&mut self.prev, &mut self.next, &mut self.red_edge, &mut self.mate] {
            v.clear();
            v.resize(n + 1, 0);
        }
        self.label.clear();
        self.label.resize(n + 1, HamLabel::Unsat);
        self.counts = [0; 6];
        self.counts[HamLabel::Unsat.slot()] = n;
        self.head = 0;
        self.tail = 0;
        for r in &mut self.reds_at {
            r.clear();
        }
        self.unsat.clear();
        self.off_path.clear();
        self.permissible.clear();
        self.padding.clear();
        for v in 1..=n {
            self.unsat.insert(v);
            self.off_path.insert(v);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, v: usize) -> HamLabel {
        self.label[v]
    }

    pub fn count(&self, l: HamLabel) -> usize {
        self.counts[l.slot()]
    }

    /// Path length `X`.
    pub fn path_len(&self) -> usize {
        self.n - self.off_path.len()
    }

    /// Matched off-path vertices `Y`.
    pub fn matched(&self) -> usize {
        self.count(HamLabel::Matched)
    }

    /// Red vertices `R`.
    pub fn red(&self) -> usize {
        self.count(HamLabel::Red)
    }

    pub fn endpoints(&self) -> Option<(usize, usize)> {
        (self.head != 0).then_some((self.head, self.tail))
    }

    /// Path vertices from head to tail.
    pub fn path(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.path_len());
        let mut v = self.head;
        while v != 0 {
            out.push(v);
            v = self.next[v];
        }
        out
    }

    fn set_label(&mut self, v: usize, l: HamLabel) {
        let old = self.label[v];
        if old == l {
            return;
        }
        self.counts[old.slot()] -= 1;
        self.counts[l.slot()] += 1;
        self.label[v] = l;
        if old == HamLabel::Permissible {
            self.permissible.remove(v);
        }
        if l == HamLabel::Permissible {
            self.permissible.insert(v);
        }
        if l != HamLabel::Useless {
            self.padding.remove(v);
        }
    }

    fn natural(&self, v: usize) -> Natural {
        if self.red_edge[v] != 0 {
            return Natural::Red;
        }
        let (p, q) = (self.prev[v], self.next[v]);
        let red = |x: usize| x != 0 && self.red_edge[x] != 0;
        if red(p) || red(q) {
            return Natural::Green;
        }
        let pp = if p != 0 { self.prev[p] } else { 0 };
        let qq = if q != 0 { self.next[q] } else { 0 };
        if red(pp) || red(qq) {
            Natural::Useless
        } else {
            Natural::Free
        }
    }

    /// Queue `v` and everything within path distance 2 for relabelling.
    fn touch_ball(&mut self, v: usize) {
        self.touched.push(v);
        let mut a = v;
        let mut b = v;
        for _ in 0..2 {
            if a != 0 {
                a = self.prev[a];
                if a != 0 {
                    self.touched.push(a);
                }
            }
            if b != 0 {
                b = self.next[b];
                if b != 0 {
                    self.touched.push(b);
                }
            }
        }
    }

    fn relabel_touched(&mut self) {
        let touched = std::mem::take(&mut self.touched);
        for &v in &touched {
            if !self.label[v].on_path() {
                continue;
            }
            match self.natural(v) {
                Natural::Red => self.set_label(v, HamLabel::Red),
                Natural::Green => self.set_label(v, HamLabel::Green),
                Natural::Useless => {
                    self.set_label(v, HamLabel::Useless);
                    self.padding.remove(v);
                }
                Natural::Free => {
                    if !self.padding.contains(v) {
                        self.set_label(v, HamLabel::Permissible);
                    }
                }
            }
        }
        let mut touched = touched;
        touched.clear();
        self.touched = touched;
        self.rebalance_padding();
    }

    /// Keep `#USELESS = 2R` while permissible vertices remain.
    fn rebalance_padding(&mut self) {
        let target = 2 * self.red();
        while self.count(HamLabel::Useless) > target {
            let Some(v) = self.padding.last() else { break };
            self.padding.remove(v);
            self.set_label(v, HamLabel::Permissible);
        }
        while self.count(HamLabel::Useless) < target {
            let Some(v) = self.permissible.last() else { break };
            self.set_label(v, HamLabel::Useless);
            self.padding.insert(v);
        }
    }

    /// `v` leaves the off-path pool; every red edge into it is dropped.
    fn absorb(&mut self, v: usize) {
        let reds = std::mem::take(&mut self.reds_at[v]);
        for &x in &reds {
            self.red_edge[x] = 0;
            self.touch_ball(x);
        }
        let mut reds = reds;
        reds.clear();
        self.reds_at[v] = reds;
        self.off_path.remove(v);
        self.unsat.remove(v);
        self.mate[v] = 0;
        // placeholder; relabelling fixes the class
        self.set_label(v, HamLabel::Permissible);
    }

    fn link(&mut self, a: usize, b: usize) {
        if a != 0 {
            self.next[a] = b;
        } else {
            self.head = b;
        }
        if b != 0 {
            self.prev[b] = a;
        } else {
            self.tail = a;
        }
    }

    fn append(&mut self, v: usize) {
        let t = self.tail;
        self.link(t, v);
        self.link(v, 0);
    }

    /// Splice `between` into the path edge `a`-`b`.
    fn insert_between(&mut self, a: usize, b: usize, between: &[usize]) {
        let mut left = a;
        for &v in between {
            self.link(left, v);
            left = v;
        }
        self.link(left, b);
    }

    /// The red path neighbour of a green vertex.
    fn red_neighbour(&self, g: usize) -> usize {
        let (p, q) = (self.prev[g], self.next[g]);
        if p != 0 && self.red_edge[p] != 0 {
            p
        } else {
            debug_assert!(q != 0 && self.red_edge[q] != 0);
            q
        }
    }

    /// The case a round with these squares falls into; (c) is reported
    /// as [`CaseLabel::C`] without the sub-case.
    pub fn case_for(&self, squares: &[usize]) -> CaseLabel {
        let has = |l: HamLabel| squares.iter().any(|&u| self.label[u] == l);
        if has(HamLabel::Unsat) {
            CaseLabel::A
        } else if has(HamLabel::Matched) {
            CaseLabel::B
        } else if has(HamLabel::Green) {
            CaseLabel::C
        } else if has(HamLabel::Permissible) && !self.off_path.is_empty() {
            CaseLabel::D
        } else {
            CaseLabel::E
        }
    }

    /// Apply one round for the given squares. Adds the edge to `g`.
    pub fn step<R: Rng + ?Sized>(&mut self, g: &mut GraphState, squares: &[usize], policy: TieBreak, rng: &mut R) -> StepOutcome {
        let expected = self.case_for(squares);
        let out = self.apply(g, squares, policy, rng);
        debug_assert_eq!(out.case.index(), expected.index());
        out
    }

    fn apply<R: Rng + ?Sized>(&mut self, g: &mut GraphState, squares: &[usize], policy: TieBreak, rng: &mut R) -> StepOutcome {
        let choose = |want: HamLabel, rng: &mut R| {
            pick_square(squares, (0..squares.len()).filter(|&i| self.label[squares[i]] == want), policy, rng)
        };
        let outcome = |i: usize, circle: usize, case: CaseLabel, progressed: bool| StepOutcome {
            square_index: i,
            square: squares[i],
            circle,
            case,
            progressed,
        };
        if let Some(i) = choose(HamLabel::Unsat, rng) {
            let u = squares[i];
            let v = self.unsat.sample(rng).expect("u is unsaturated");
            g.add_edge(u, v);
            if v != u {
                self.unsat.remove(u);
                self.unsat.remove(v);
                self.mate[u] = v;
                self.mate[v] = u;
                self.set_label(u, HamLabel::Matched);
                self.set_label(v, HamLabel::Matched);
            }
            return outcome(i, v, CaseLabel::A, v != u);
        }
        if let Some(i) = choose(HamLabel::Matched, rng) {
            let u = squares[i];
            let m = self.mate[u];
            let v = if self.tail != 0 { self.tail } else { m };
            g.add_edge(u, v);
            self.absorb(u);
            self.absorb(m);
            self.append(u);
            self.append(m);
            self.touch_ball(u);
            self.touch_ball(m);
            self.relabel_touched();
            return outcome(i, v, CaseLabel::B, true);
        }
        if let Some(i) = choose(HamLabel::Green, rng) {
            let u = squares[i];
            let y = self.red_neighbour(u);
            let z = self.red_edge[y];
            let q = self.mate[z];
            let (v, case) = if q == 0 { (z, CaseLabel::CPrime) } else { (q, CaseLabel::CDoublePrime) };
            g.add_edge(u, v);
            // y's own red edge is among those into z
            self.absorb(z);
            if q != 0 {
                self.absorb(q);
            }
            let (a, b) = if self.next[u] == y { (u, y) } else { (y, u) };
            let inserted: Vec<usize> = match (q != 0, a == u) {
                (false, _) => vec![z],
                (true, true) => vec![q, z],
                (true, false) => vec![z, q],
            };
            self.insert_between(a, b, &inserted);
            for &w in &inserted {
                self.touch_ball(w);
            }
            self.relabel_touched();
            return outcome(i, v, case, true);
        }
        if !self.off_path.is_empty() {
            if let Some(i) = choose(HamLabel::Permissible, rng) {
                let u = squares[i];
                let v = self.off_path.sample(rng).expect("off-path pool is nonempty");
                g.add_edge(u, v);
                self.red_edge[u] = v;
                self.reds_at[v].push(u);
                self.touch_ball(u);
                self.relabel_touched();
                return outcome(i, v, CaseLabel::D, false);
            }
        }
        let u = squares[0];
        g.add_edge(u, u);
        outcome(0, u, CaseLabel::E, false)
    }

    /// Path-only greedy: extend the path on any off-path square, else pass.
    pub fn step_greedy<R: Rng + ?Sized>(&mut self, g: &mut GraphState, squares: &[usize], policy: TieBreak, rng: &mut R) -> StepOutcome {
        let pick = pick_square(squares, (0..squares.len()).filter(|&i| !self.label[squares[i]].on_path()), policy, rng);
        match pick {
            Some(i) => {
                let u = squares[i];
                let v = if self.tail != 0 {
                    self.tail
                } else {
                    // empty path: start it with an edge to another vertex
                    (1..=self.n).find(|&w| w != u).unwrap_or(u)
                };
                g.add_edge(u, v);
                if self.tail == 0 && v != u {
                    self.absorb(v);
                    self.append(v);
                }
                self.absorb(u);
                self.append(u);
                StepOutcome {
                    square_index: i,
                    square: u,
                    circle: v,
                    case: CaseLabel::Greedy,
                    progressed: true,
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
        let mut counts = [0usize; 6];
        for v in 1..=self.n {
            counts[self.label[v].slot()] += 1;
        }
        if counts != self.counts {
            return bad(format!("label counts {counts:?} vs tracked {:?}", self.counts));
        }
        if counts.iter().sum::<usize>() != self.n {
            return bad("classes do not partition the vertex set".into());
        }
        // path structure
        let path = self.path();
        let x = self.path_len();
        if path.len() != x {
            return bad(format!("walk from head finds {} vertices, expected {x}", path.len()));
        }
        if x > 0 && (self.prev[self.head] != 0 || self.next[self.tail] != 0 || *path.last().unwrap() != self.tail) {
            return bad("endpoints are inconsistent".into());
        }
        for w in path.windows(2) {
            if self.prev[w[1]] != w[0] {
                return bad(format!("prev/next disagree at {}-{}", w[0], w[1]));
            }
        }
        for &v in &path {
            if !self.label[v].on_path() || self.off_path.contains(v) {
                return bad(format!("path vertex {v} is labelled {:?}", self.label[v]));
            }
        }
        let (mut green, mut useless) = (0, 0);
        for &v in &path {
            let nat = self.natural(v);
            let lab = self.label[v];
            let ok = match nat {
                Natural::Red => lab == HamLabel::Red,
                Natural::Green => lab == HamLabel::Green,
                Natural::Useless => lab == HamLabel::Useless && !self.padding.contains(v),
                Natural::Free => match lab {
                    HamLabel::Useless => self.padding.contains(v),
                    HamLabel::Permissible => self.permissible.contains(v),
                    _ => false,
                },
            };
            if !ok {
                return bad(format!("path vertex {v} is {lab:?} but its neighbourhood says {nat:?}"));
            }
            if lab == HamLabel::Red {
                let z = self.red_edge[v];
                if self.label[z].on_path() || !self.reds_at[z].contains(&v) {
                    return bad(format!("red edge {v}-{z} does not end at an indexed off-path vertex"));
                }
                let mut a = v;
                let mut b = v;
                for _ in 0..2 {
                    a = if a != 0 { self.prev[a] } else { 0 };
                    b = if b != 0 { self.next[b] } else { 0 };
                    if (a != 0 && self.red_edge[a] != 0) || (b != 0 && self.red_edge[b] != 0) {
                        return bad(format!("red vertex {v} has another red within distance 2"));
                    }
                }
            }
            green += (lab == HamLabel::Green) as usize;
            useless += (lab == HamLabel::Useless) as usize;
        }
        let r = self.red();
        if green > 2 * r || green + 4 < 2 * r {
            return bad(format!("{green} green vertices for R = {r}"));
        }
        if useless > 2 * r || (useless < 2 * r && !self.permissible.is_empty()) {
            return bad(format!("{useless} useless vertices for R = {r} with permissible vertices left"));
        }
        if self.permissible.len() != self.count(HamLabel::Permissible) {
            return bad("permissible set out of sync".into());
        }
        // off-path structure
        let mut off = 0;
        for v in 1..=self.n {
            match self.label[v] {
                HamLabel::Matched => {
                    off += 1;
                    let m = self.mate[v];
                    if m == 0 || m == v || self.mate[m] != v || self.label[m] != HamLabel::Matched {
                        return bad(format!("matched vertex {v} has a broken mate"));
                    }
                }
                HamLabel::Unsat => {
                    off += 1;
                    if !self.unsat.contains(v) || self.mate[v] != 0 {
                        return bad(format!("unsaturated vertex {v} is not indexed"));
                    }
                }
                _ => {
                    if self.red_edge[v] == 0 && !self.reds_at[v].is_empty() {
                        return bad(format!("path vertex {v} still receives red edges"));
                    }
                }
            }
            if !self.label[v].on_path() {
                for &x in &self.reds_at[v] {
                    if self.red_edge[x] != v {
                        return bad(format!("stale red edge {x} -> {v}"));
                    }
                }
            }
        }
        if off != self.off_path.len() || self.unsat.len() != self.count(HamLabel::Unsat) {
            return bad("off-path sets out of sync".into());
        }
        if !self.matched().is_multiple_of(2) {
            return bad(format!("odd matched count {}", self.matched()));
        }
        if self.count(HamLabel::Unsat) != self.n - x - self.matched() {
            return bad("#UNSAT != n - X - Y".into());
        }
        Ok(())
    }

    /// Counts `(X, Y, #GREEN, #RED + #USELESS)` used by the exact case
    /// probabilities.
    pub fn class_counts(&self) -> HamCounts {
        HamCounts {
            path: self.path_len(),
            matched: self.matched(),
            green: self.count(HamLabel::Green),
            blocked: self.count(HamLabel::Red) + self.count(HamLabel::Useless),
        }
    }
}

/// Exact class sizes at a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamCounts {
    pub path: usize,
    pub matched: usize,
    pub green: usize,
    /// Red plus useless vertices.
    pub blocked: usize,
}

/// Case probabilities `(P_a .. P_e)` from exact class sizes.
pub fn ham_case_probabilities_exact(c: HamCounts, n: usize, k: u32) -> Result<[f64; 5]> {
    if c.path + c.matched > n || c.green + c.blocked > c.path {
        return Err(Error::InvalidCounts(format!("inconsistent class sizes {c:?} for n = {n}")));
    }
    let n = n as f64;
    let s1 = (c.path + c.matched) as f64 / n;
    let s2 = c.path as f64 / n;
    let s3 = (c.path - c.green) as f64 / n;
    let s4 = c.blocked as f64 / n;
    let ki = k as i32;
    Ok([1.0 - s1.powi(ki), pow_diff(s1, s2, k), pow_diff(s2, s3, k), pow_diff(s3, s4, k), s4.powi(ki)])
}

/// Case probabilities with `#GREEN = 2R` and `#RED + #USELESS = 3R`.
pub fn ham_case_probabilities(x: f64, y: f64, r: f64, n: f64, k: u32) -> Result<[f64; 5]> {
    if x < 0.0 || y < 0.0 || r < 0.0 || x + y > n * (1.0 + 1e-12) || 5.0 * r > x + 1e-9 {
        return Err(Error::InvalidCounts(format!("need 0 <= 5R <= X, X + Y <= n; got X = {x}, Y = {y}, R = {r}, n = {n}")));
    }
    let s1 = ((x + y) / n).min(1.0);
    let s2 = x / n;
    let s3 = (x - 2.0 * r) / n;
    let s4 = 3.0 * r / n;
    let ki = k as i32;
    Ok([1.0 - s1.powi(ki), pow_diff(s1, s2, k), pow_diff(s2, s3, k), pow_diff(s3, s4, k), s4.powi(ki)])
}

/// Leading-order expected one-round changes `(E dX, E dY, E dR)`.
pub fn ham_trend(x: f64, y: f64, r: f64, n: f64, k: u32) -> Result<(f64, f64, f64)> {
    let [pa, pb, pc, pd, _] = ham_case_probabilities(x, y, r, n, k)?;
    let u = n - x;
    let absorbed = 2.0 * pb + (1.0 + y / u) * pc;
    let dx = absorbed;
    let dy = 2.0 * pa - 2.0 * pb - 2.0 * pc * y / u;
    let dr = -pc + pd - absorbed * r / u;
    Ok((dx, dy, dr))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamSample {
    pub t: u64,
    pub path: usize,
    pub matched: usize,
    pub red: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamTrace {
    /// First round with `X >= x_stop * n`.
    pub threshold_round: u64,
    /// Extra rounds to a Hamilton cycle.
    pub completion_rounds: u64,
    pub samples: Vec<HamSample>,
    /// Vertex order of the final Hamilton cycle.
    pub cycle: Vec<usize>,
}

fn ham_sample(h: &HamState, g: &GraphState) -> HamSample {
    HamSample {
        t: g.t(),
        path: h.path_len(),
        matched: h.matched(),
        red: h.red(),
    }
}

/// Check that `cycle` visits every vertex once and that consecutive
/// vertices (cyclically) are joined by recorded edges.
pub fn verify_cycle(cycle: &[usize], g: &GraphState) -> Result<()> {
    let n = g.n();
    let mut seen = vec![false; n + 1];
    if cycle.len() != n {
        return Err(Error::Invariant(format!("cycle has {} vertices, n = {n}", cycle.len())));
    }
    for &v in cycle {
        if v == 0 || v > n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Invariant(format!("cycle repeats or leaves [n] at {v}")));
        }
    }
    let Some(edges) = g.edges() else {
        return Ok(());
    };
    let set: HashSet<(usize, usize)> = edges.iter().map(|e| (e.square.min(e.circle), e.square.max(e.circle))).collect();
    for i in 0..n {
        let (a, b) = (cycle[i], cycle[(i + 1) % n]);
        if !set.contains(&(a.min(b), a.max(b))) {
            return Err(Error::Invariant(format!("cycle edge {a}-{b} is not in the graph")));
        }
    }
    Ok(())
}

/// Step until the path is Hamiltonian, then wait for a square on an
/// endpoint and join it to the other endpoint. Returns the extra rounds
/// and the cycle.
pub fn ham_completion<R: Rng + ?Sized>(h: &mut HamState, g: &mut GraphState, rng: &mut R, opts: RunOptions) -> Result<(u64, Vec<usize>)> {
    let n = h.n();
    if n < 3 {
        return Err(Error::InvalidConfig(format!("a Hamilton cycle needs n >= 3, got {n}")));
    }
    let start = g.t();
    let policy = g.config().square_tie_break;
    let mut squares = Vec::with_capacity(g.k());
    while h.path_len() < n {
        g.draw_squares_into(rng, &mut squares);
        h.step(g, &squares, policy, rng);
        if opts.validate {
            h.validate()?;
            g.validate()?;
        }
    }
    close_cycle(h, g, rng)?;
    let cycle = h.path();
    verify_cycle(&cycle, g)?;
    Ok((g.t() - start, cycle))
}

/// With a Hamilton path in place, wait for a square on an endpoint and join
/// it to the other endpoint.
pub fn close_cycle<R: Rng + ?Sized>(h: &HamState, g: &mut GraphState, rng: &mut R) -> Result<()> {
    if h.path_len() != h.n() {
        return Err(Error::Invariant(format!("path covers {} of {} vertices", h.path_len(), h.n())));
    }
    let (a, b) = h.endpoints().expect("path is nonempty");
    let mut squares = Vec::with_capacity(g.k());
    loop {
        g.draw_squares_into(rng, &mut squares);
        let hit = squares.iter().position(|&s| s == a || s == b);
        match hit {
            Some(i) => {
                let u = squares[i];
                g.add_edge(u, if u == a { b } else { a });
                break;
            }
            None => g.add_edge(squares[0], squares[0]),
        }
    }
    Ok(())
}

/// Run the path strategy until `X >= x_stop * n`, then complete a cycle.
pub fn ham_run<R: Rng + ?Sized>(g: &mut GraphState, h: &mut HamState, x_stop: f64, rng: &mut R, opts: RunOptions) -> Result<HamTrace> {
    let n = g.n();
    if n < 3 {
        return Err(Error::InvalidConfig(format!("a Hamilton cycle needs n >= 3, got {n}")));
    }
    if !(x_stop > 0.0 && x_stop <= 1.0) {
        return Err(Error::InvalidConfig(format!("x_stop = {x_stop} must lie in (0, 1]")));
    }
    let policy = g.config().square_tie_break;
    let target = x_stop * n as f64;
    let stride = opts.stride.map(|s| s.max(1));
    let mut samples = Vec::new();
    if stride.is_some() {
        samples.push(ham_sample(h, g));
    }
    let mut squares = Vec::with_capacity(g.k());
    while (h.path_len() as f64) < target {
        g.draw_squares_into(rng, &mut squares);
        h.step(g, &squares, policy, rng);
        if opts.validate {
            h.validate()?;
            g.validate()?;
        }
        if let Some(s) = stride {
            if g.t().is_multiple_of(s) {
                samples.push(ham_sample(h, g));
            }
        }
    }
    let threshold_round = g.t();
    let (completion_rounds, cycle) = ham_completion(h, g, rng, opts)?;
    Ok(HamTrace {
        threshold_round,
        completion_rounds,
        samples,
        cycle,
    })
}

pub fn ham_run_config<R: Rng + ?Sized>(config: ProcessConfig, x_stop: f64, rng: &mut R, opts: RunOptions) -> Result<HamTrace> {
    let mut g = GraphState::new(config)?;
    let mut h = HamState::new(g.n());
    ham_run(&mut g, &mut h, x_stop, rng, opts)
}
