//! Seeded Monte Carlo trials.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{Target, TrialSpec};
use super::stats::{mean_sd, normal_ci95};
use crate::error::{Error, Result};
use crate::ode::Trajectory;
use crate::process::GraphState;
use crate::rng::trial_rng;
use crate::strategies::hamilton::{close_cycle, ham_run, verify_cycle, HamSample, HamState};
use crate::strategies::large_k::two_phase_mindeg;
use crate::strategies::matching::{pm_run, PmSample, PmState};
use crate::strategies::mindeg::{run_min_degree, CircleRule};
use crate::strategies::{RunOptions, StrategyKind};

/// The outcome of one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Round at which the target counts as reached: the full hitting time
    /// for minimum degree, the threshold round for matchings and cycles.
    pub hitting_round: u64,
    pub threshold_round: u64,
    /// Rounds after the threshold until the structure was complete.
    pub completion_rounds: u64,
    /// Minimum-degree phase ends `t_q`; empty for other targets.
    pub breakpoints: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    /// Scaled counts against `t / n`, when a stride was requested.
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub records: Vec<TrialRecord>,
    pub mean_h_over_n: f64,
    pub sd_h_over_n: f64,
    pub ci95_h_over_n: [f64; 2],
    /// Mean `t_q / n` for each phase of a minimum-degree run.
    pub mean_breakpoints: Vec<f64>,
    pub mean_completion_rounds: f64,
    /// Largest distance to the limiting trajectory, if it was measured.
    pub sup_distance: Option<f64>,
}

impl TrialSummary {
    pub fn from_records(n: usize, records: Vec<TrialRecord>) -> Self {
        let nf = n as f64;
        let h: Vec<f64> = records.iter().map(|r| r.hitting_round as f64 / nf).collect();
        let (mean, sd) = mean_sd(&h);
        let phases = records.first().map_or(0, |r| r.breakpoints.len());
        let mean_breakpoints = (0..phases)
            .map(|q| records.iter().map(|r| r.breakpoints[q] as f64 / nf).sum::<f64>() / records.len() as f64)
            .collect();
        let completion: Vec<f64> = records.iter().map(|r| r.completion_rounds as f64).collect();
        Self {
            ci95_h_over_n: normal_ci95(mean, sd, h.len()),
            mean_h_over_n: mean,
            sd_h_over_n: sd,
            mean_breakpoints,
            mean_completion_rounds: mean_sd(&completion).0,
            records,
            sup_distance: None,
        }
    }

    pub fn hitting_rounds(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.hitting_round).collect()
    }
}

/// Per-thread state reused across trials.
struct Workspace {
    g: GraphState,
    pm: Option<PmState>,
    ham: Option<HamState>,
}

impl Workspace {
    fn new(spec: &TrialSpec) -> Self {
        let g = GraphState::new(spec.process_config()).expect("validated configuration");
        let n = spec.n;
        Self {
            g,
            pm: (spec.target == Target::PerfectMatching).then(|| PmState::new(n)),
            ham: (spec.target == Target::HamiltonCycle).then(|| HamState::new(n)),
        }
    }
}

fn scaled(coords: &[&str], n: usize, rows: impl Iterator<Item = (u64, Vec<usize>)>) -> Trajectory {
    let nf = n as f64;
    let mut tr = Trajectory::new(coords);
    for (t, v) in rows {
        tr.push(t as f64 / nf, v.into_iter().map(|c| c as f64 / nf).collect());
    }
    tr
}

fn pm_trajectory(n: usize, samples: &[PmSample]) -> Trajectory {
    scaled(&["x", "r"], n, samples.iter().map(|s| (s.t, vec![s.saturated, s.red])))
}

fn ham_trajectory(n: usize, samples: &[HamSample]) -> Trajectory {
    scaled(&["x", "y", "r"], n, samples.iter().map(|s| (s.t, vec![s.path, s.matched, s.red])))
}

fn due(g: &GraphState, stride: Option<u64>) -> bool {
    stride.is_some_and(|s| g.t().is_multiple_of(s))
}

fn greedy_matching<R: Rng + ?Sized>(ws: &mut Workspace, spec: &TrialSpec, rng: &mut R, opts: RunOptions) -> Result<(u64, u64, Vec<PmSample>)> {
    let (g, pm) = (&mut ws.g, ws.pm.as_mut().expect("matching state"));
    let policy = g.config().square_tie_break;
    let target = spec.threshold * spec.n as f64;
    let sample = |pm: &PmState, g: &GraphState| PmSample {
        t: g.t(),
        saturated: pm.saturated(),
        red: pm.red(),
    };
    let mut samples = Vec::new();
    if opts.stride.is_some() {
        samples.push(sample(pm, g));
    }
    let mut squares = Vec::with_capacity(spec.k);
    let mut threshold_round = None;
    while !pm.is_perfect() {
        if threshold_round.is_none() && pm.saturated() as f64 >= target {
            threshold_round = Some(g.t());
        }
        g.draw_squares_into(rng, &mut squares);
        pm.step_greedy(g, &squares, policy, rng);
        if opts.validate {
            pm.validate()?;
            g.validate()?;
        }
        if threshold_round.is_none() && due(g, opts.stride) {
            samples.push(sample(pm, g));
        }
    }
    let thr = threshold_round.unwrap_or(g.t());
    Ok((thr, g.t() - thr, samples))
}

fn greedy_path<R: Rng + ?Sized>(ws: &mut Workspace, spec: &TrialSpec, rng: &mut R, opts: RunOptions) -> Result<(u64, u64, Vec<HamSample>)> {
    let (g, h) = (&mut ws.g, ws.ham.as_mut().expect("path state"));
    let policy = g.config().square_tie_break;
    let target = spec.threshold * spec.n as f64;
    let sample = |h: &HamState, g: &GraphState| HamSample {
        t: g.t(),
        path: h.path_len(),
        matched: h.matched(),
        red: h.red(),
    };
    let mut samples = Vec::new();
    if opts.stride.is_some() {
        samples.push(sample(h, g));
    }
    let mut squares = Vec::with_capacity(spec.k);
    let mut threshold_round = None;
    while h.path_len() < spec.n {
        if threshold_round.is_none() && h.path_len() as f64 >= target {
            threshold_round = Some(g.t());
        }
        g.draw_squares_into(rng, &mut squares);
        h.step_greedy(g, &squares, policy, rng);
        if opts.validate {
            h.validate()?;
            g.validate()?;
        }
        if threshold_round.is_none() && due(g, opts.stride) {
            samples.push(sample(h, g));
        }
    }
    let thr = threshold_round.unwrap_or(g.t());
    close_cycle(h, g, rng)?;
    verify_cycle(&h.path(), g)?;
    Ok((thr, g.t() - thr, samples))
}

fn run_one(ws: &mut Workspace, spec: &TrialSpec, trial: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(spec.seed, trial);
    ws.g.reset();
    let opts = RunOptions {
        stride: spec.stride,
        validate: spec.validate,
    };
    let n = spec.n;
    let record = |hit: u64, thr: u64, comp: u64, bps: Vec<u64>| TrialRecord {
        trial,
        hitting_round: hit,
        threshold_round: thr,
        completion_rounds: comp,
        breakpoints: bps,
    };
    match (spec.target, spec.strategy) {
        (Target::MinDegree(l), StrategyKind::TwoPhase) => {
            let r = two_phase_mindeg(&mut ws.g, l, &mut rng)?;
            if spec.validate {
                ws.g.validate()?;
            }
            Ok(TrialOutcome {
                record: record(r.total_rounds, r.total_rounds, 0, Vec::new()),
                trajectory: None,
            })
        }
        (Target::MinDegree(l), kind) => {
            let tr = run_min_degree(&mut ws.g, CircleRule::from_kind(kind)?, l, &mut rng, opts)?;
            let labels: Vec<String> = (0..l).map(|i| format!("y{i}")).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let trajectory = spec.stride.map(|_| scaled(&refs, n, tr.samples.iter().map(|s| (s.t, s.counts.clone()))));
            Ok(TrialOutcome {
                record: record(tr.hitting_round, tr.hitting_round, 0, tr.breakpoints),
                trajectory,
            })
        }
        (Target::PerfectMatching, StrategyKind::GreedyMatching) => {
            ws.pm.as_mut().expect("matching state").reset();
            let (thr, comp, samples) = greedy_matching(ws, spec, &mut rng, opts)?;
            Ok(TrialOutcome {
                record: record(thr, thr, comp, Vec::new()),
                trajectory: spec.stride.map(|_| pm_trajectory(n, &samples)),
            })
        }
        (Target::PerfectMatching, _) => {
            let pm = ws.pm.as_mut().expect("matching state");
            pm.reset();
            let tr = pm_run(&mut ws.g, pm, 1.0 - spec.threshold, &mut rng, opts)?;
            Ok(TrialOutcome {
                record: record(tr.threshold_round, tr.threshold_round, tr.completion_rounds, Vec::new()),
                trajectory: spec.stride.map(|_| pm_trajectory(n, &tr.samples)),
            })
        }
        (Target::HamiltonCycle, StrategyKind::GreedyPath) => {
            ws.ham.as_mut().expect("path state").reset();
            let (thr, comp, samples) = greedy_path(ws, spec, &mut rng, opts)?;
            Ok(TrialOutcome {
                record: record(thr, thr, comp, Vec::new()),
                trajectory: spec.stride.map(|_| ham_trajectory(n, &samples)),
            })
        }
        (Target::HamiltonCycle, _) => {
            let h = ws.ham.as_mut().expect("path state");
            h.reset();
            let tr = ham_run(&mut ws.g, h, spec.threshold, &mut rng, opts)?;
            Ok(TrialOutcome {
                record: record(tr.threshold_round, tr.threshold_round, tr.completion_rounds, Vec::new()),
                trajectory: spec.stride.map(|_| ham_trajectory(n, &tr.samples)),
            })
        }
    }
}

/// Run every trial of `spec` in parallel, keeping trial order. Trial `i`
/// draws from `trial_rng(seed, i)`, so results do not depend on the thread
/// count.
pub fn run_trial_outcomes(spec: &TrialSpec) -> Result<Vec<TrialOutcome>> {
    spec.validate()?;
    (0..spec.trials)
        .into_par_iter()
        .map_init(
            || Workspace::new(spec),
            |ws, i| {
                run_one(ws, spec, i).map_err(|e| Error::Trial {
                    trial: i,
                    source: Box::new(e),
                })
            },
        )
        .collect()
}

/// Run the trials and summarise the hitting times.
pub fn run_trials(spec: &TrialSpec) -> Result<TrialSummary> {
    let outcomes = run_trial_outcomes(spec)?;
    Ok(TrialSummary::from_records(spec.n, outcomes.into_iter().map(|o| o.record).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_thread_counts() {
        let spec = TrialSpec::new(Target::MinDegree(2), 300, 2, 16, 11);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_trials(&spec)).unwrap();
        let b = four.install(|| run_trials(&spec)).unwrap();
        assert_eq!(a, b);
        assert!(a.ci95_h_over_n[0] <= a.mean_h_over_n && a.mean_h_over_n <= a.ci95_h_over_n[1]);
        assert_eq!(a.mean_breakpoints.len(), 2);
    }

    #[test]
    fn every_strategy_runs_with_validation() {
        let cases = [
            (Target::MinDegree(2), StrategyKind::Greedy),
            (Target::MinDegree(2), StrategyKind::UniformCircle),
            (Target::MinDegree(2), StrategyKind::MaxDegreeCircle),
            (Target::MinDegree(2), StrategyKind::TwoPhase),
            (Target::PerfectMatching, StrategyKind::Matching),
            (Target::PerfectMatching, StrategyKind::GreedyMatching),
            (Target::HamiltonCycle, StrategyKind::Hamilton),
            (Target::HamiltonCycle, StrategyKind::GreedyPath),
        ];
        for (target, strategy) in cases {
            for k in [1, 3] {
                let mut spec = TrialSpec::new(target, 60, k, 3, 5).with_strategy(strategy).with_default_stride();
                spec.validate = true;
                let outs = run_trial_outcomes(&spec).unwrap();
                for o in &outs {
                    let r = &o.record;
                    assert!(r.hitting_round >= 1 && r.threshold_round == r.hitting_round, "{target} {strategy}");
                    if strategy != StrategyKind::TwoPhase {
                        assert!(o.trajectory.as_ref().is_some_and(|t| !t.s.is_empty()));
                    }
                }
            }
        }
    }

    #[test]
    fn trial_errors_carry_the_index() {
        let spec = TrialSpec::new(Target::PerfectMatching, 7, 1, 2, 0);
        assert!(matches!(run_trials(&spec), Err(Error::OddVertexCount(7))));
    }
}
