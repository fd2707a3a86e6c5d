//! Solvers returning the constants and trajectories of the three systems.

use log::warn;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, Crossing, Event, IntegratorConfig, IntegratorStats, OdeSystem};
use super::systems::{HamSystem, MinDegreeSystem, PmSystem};
use crate::error::{Error, Result};

/// Largest `s` explored before giving up on an event.
pub const MIN_DEGREE_BUDGET_PER_LEVEL: f64 = 4.0;
pub const PM_BUDGET: f64 = 3.0;
pub const HAM_BUDGET: f64 = 3.0;
/// Matching-phase stopping level `1 - x = eps`.
pub const PM_EPS: f64 = 1e-14;
/// Added to the matching constant for the clean-up phase.
pub const PM_CLEANUP: f64 = 1e-5;
pub const HAM_X_STOP: f64 = 1.0 - 1e-9;
/// Terminal `x'` below which the matching endgame is flagged as slow.
pub const PM_SLOW_ENDGAME: f64 = 0.05;
/// Spacing of stored trajectory samples.
pub const SAMPLE_DT: f64 = 1e-3;

/// A trajectory on a uniform grid in `s`. `coords` names the components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub coords: Vec<String>,
    pub s: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(coords: &[&str]) -> Self {
        Self {
            coords: coords.iter().map(|c| c.to_string()).collect(),
            s: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, s: f64, v: Vec<f64>) {
        self.s.push(s);
        self.values.push(v);
    }

    /// Linear interpolation of every coordinate at `s`, clamped to the
    /// covered range.
    pub fn at(&self, s: f64) -> Vec<f64> {
        let n = self.s.len();
        if n == 0 {
            return Vec::new();
        }
        if s <= self.s[0] {
            return self.values[0].clone();
        }
        if s >= self.s[n - 1] {
            return self.values[n - 1].clone();
        }
        let i = self.s.partition_point(|&t| t <= s) - 1;
        let (s0, s1) = (self.s[i], self.s[i + 1]);
        let a = (s - s0) / (s1 - s0);
        self.values[i].iter().zip(&self.values[i + 1]).map(|(u, v)| u + a * (v - u)).collect()
    }

    /// First grid time at which coordinate `c` reaches `level`, refined by
    /// linear interpolation.
    pub fn first_reaching(&self, c: usize, level: f64) -> Option<f64> {
        let up = self.values.last()?[c] >= self.values.first()?[c];
        for i in 1..self.s.len() {
            let (a, b) = (self.values[i - 1][c], self.values[i][c]);
            let hit = if up { a < level && b >= level } else { a > level && b <= level };
            if hit {
                return Some(self.s[i - 1] + (level - a) / (b - a) * (self.s[i] - self.s[i - 1]));
            }
        }
        None
    }

    pub fn end(&self) -> Option<f64> {
        self.s.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSolution {
    pub k: u32,
    pub l: u32,
    /// `x_q`: the time at which `y_q` reaches zero.
    pub breakpoints: Vec<f64>,
    /// `x_{l-1}`.
    pub tau: f64,
    /// `(y_0, ..., y_{l-1})` at the end.
    pub terminal: Vec<f64>,
    /// `(y_0, ..., y_{l-1})` over time.
    pub trajectory: Trajectory,
    pub stats: IntegratorStats,
}

fn add_stats(a: &mut IntegratorStats, b: IntegratorStats) {
    a.accepted += b.accepted;
    a.rejected += b.rejected;
    a.evaluations += b.evaluations;
}

/// Chain the `l` phases of the minimum-degree system.
pub fn solve_min_degree(k: u32, l: u32, cfg: &IntegratorConfig) -> Result<PhaseSolution> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidConfig(format!("need k, l >= 1, got k = {k}, l = {l}")));
    }
    let labels: Vec<String> = (0..l).map(|i| format!("y{i}")).collect();
    let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let mut traj = Trajectory::new(&label_refs);
    let mut y = vec![0.0; l as usize];
    y[0] = 1.0;
    traj.push(0.0, y.clone());
    let mut s = 0.0;
    let mut breakpoints = Vec::with_capacity(l as usize);
    let mut stats = IntegratorStats::default();
    let vanish = |_s: f64, v: &[f64]| v[0];
    for q in 0..l {
        let sys = MinDegreeSystem { q, k, l };
        let ev = [Event {
            func: &vanish,
            direction: Crossing::Falling,
        }];
        let budget = s + MIN_DEGREE_BUDGET_PER_LEVEL;
        let sol = integrate(&sys, cfg, s, &y[q as usize..], budget, &ev, Some(SAMPLE_DT))?;
        add_stats(&mut stats, sol.stats);
        for (t, v) in sol.samples {
            let mut full = vec![0.0; l as usize];
            full[q as usize..].copy_from_slice(&v);
            traj.push(t, full);
        }
        if sol.event.is_none() {
            return Err(Error::NoEvent {
                budget: MIN_DEGREE_BUDGET_PER_LEVEL,
            });
        }
        s = sol.s_end;
        y[q as usize..].copy_from_slice(&sol.y_end);
        // the vanished coordinate is dropped from the next phase
        y[q as usize] = 0.0;
        breakpoints.push(s);
    }
    traj.push(s, y.clone());
    Ok(PhaseSolution {
        k,
        l,
        breakpoints,
        tau: s,
        terminal: y,
        trajectory: traj,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmSolution {
    pub k: u32,
    pub eps: f64,
    /// Time at which `1 - x = eps`.
    pub u: f64,
    pub terminal_x_complement: f64,
    pub terminal_r: f64,
    /// `x'` at the stopping time.
    pub terminal_dx: f64,
    /// `x'` fell below the slow-endgame threshold.
    pub slow_endgame: bool,
    /// `(x, r)` over time.
    pub trajectory: Trajectory,
    pub stats: IntegratorStats,
}

impl PmSolution {
    /// The bound including the clean-up allowance.
    pub fn upper_bound(&self) -> f64 {
        self.u + PM_CLEANUP
    }
}

/// Integrate the matching system until `1 - x = eps`.
pub fn solve_pm(k: u32, eps: f64, cfg: &IntegratorConfig) -> Result<PmSolution> {
    if k == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidConfig(format!("need k >= 1 and eps in (0, 1), got k = {k}, eps = {eps}")));
    }
    let sys = PmSystem { k };
    let target = move |_s: f64, v: &[f64]| v[0] - eps;
    let ev = [Event {
        func: &target,
        direction: Crossing::Falling,
    }];
    // the complement coordinate needs an absolute tolerance well below eps
    let cfg = IntegratorConfig {
        atol: cfg.atol.min(eps * 1e-6),
        ..*cfg
    };
    let sol = integrate(&sys, &cfg, 0.0, &[1.0, 0.0], PM_BUDGET, &ev, Some(SAMPLE_DT))?;
    if sol.event.is_none() {
        return Err(Error::NoEvent { budget: PM_BUDGET });
    }
    let mut traj = Trajectory::new(&["x", "r"]);
    traj.push(0.0, vec![0.0, 0.0]);
    for (s, v) in &sol.samples {
        traj.push(*s, vec![1.0 - v[0], v[1]]);
    }
    let (w, r) = (sol.y_end[0], sol.y_end[1]);
    traj.push(sol.s_end, vec![1.0 - w, r]);
    let mut dv = [0.0; 2];
    sys.rhs(sol.s_end, &sol.y_end, &mut dv);
    let terminal_dx = -dv[0];
    let slow_endgame = terminal_dx < PM_SLOW_ENDGAME;
    if slow_endgame {
        warn!("matching system with k = {k}: x' = {terminal_dx:.3e} at 1 - x = {eps:e}; the endgame is slow");
    }
    Ok(PmSolution {
        k,
        eps,
        u: sol.s_end,
        terminal_x_complement: w,
        terminal_r: r,
        terminal_dx,
        slow_endgame,
        trajectory: traj,
        stats: sol.stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamSolution {
    pub k: u32,
    pub x_stop: f64,
    /// Time at which `x = x_stop`, or the budget if it was not reached.
    pub u: f64,
    pub budget_exhausted: bool,
    pub terminal: [f64; 3],
    /// `(x, y, r)` over time.
    pub trajectory: Trajectory,
    pub stats: IntegratorStats,
}

/// Integrate the Hamilton-path system until `x = x_stop` or `s = 3`.
pub fn solve_ham(k: u32, x_stop: f64, cfg: &IntegratorConfig) -> Result<HamSolution> {
    if k == 0 || !(x_stop > 0.0 && x_stop < 1.0) {
        return Err(Error::InvalidConfig(format!("need k >= 1 and x_stop in (0, 1), got k = {k}, x_stop = {x_stop}")));
    }
    let sys = HamSystem { k };
    let w_stop = 1.0 - x_stop;
    let target = move |_s: f64, v: &[f64]| v[0] - w_stop;
    let ev = [Event {
        func: &target,
        direction: Crossing::Falling,
    }];
    let cfg = IntegratorConfig {
        atol: cfg.atol.min(w_stop * 1e-5),
        ..*cfg
    };
    let sol = integrate(&sys, &cfg, 0.0, &[1.0, 0.0, 0.0], HAM_BUDGET, &ev, Some(SAMPLE_DT))?;
    let budget_exhausted = sol.event.is_none();
    if budget_exhausted {
        warn!("Hamilton system with k = {k} did not reach x = {x_stop} before s = {HAM_BUDGET}");
    }
    let mut traj = Trajectory::new(&["x", "y", "r"]);
    traj.push(0.0, vec![0.0, 0.0, 0.0]);
    for (s, v) in &sol.samples {
        traj.push(*s, vec![1.0 - v[0], v[1], v[2]]);
    }
    let e = &sol.y_end;
    traj.push(sol.s_end, vec![1.0 - e[0], e[1], e[2]]);
    Ok(HamSolution {
        k,
        x_stop,
        u: sol.s_end,
        budget_exhausted,
        terminal: [1.0 - e[0], e[1], e[2]],
        trajectory: traj,
        stats: sol.stats,
    })
}
