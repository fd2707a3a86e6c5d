//! Monte Carlo means against the exact oracle on every small instance.

use ksemi::harness::{exact_small_oracle, run_trials, OracleSpec, Target, TrialSpec};
use ksemi::process::TieBreak;
use ksemi::strategies::StrategyKind;

const TRIALS: u64 = 1_000_000;

fn within_four_sigma(spec: &TrialSpec) {
    let exact = exact_small_oracle(&OracleSpec::from(spec)).unwrap().mean();
    let s = run_trials(spec).unwrap();
    let h: Vec<f64> = s.records.iter().map(|r| (r.hitting_round + r.completion_rounds) as f64).collect();
    let m = h.len() as f64;
    let mean = h.iter().sum::<f64>() / m;
    let sd = (h.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let z = (mean - exact).abs() / (sd / m.sqrt()).max(1e-300);
    assert!(z <= 4.0, "{} {} n={} k={}: exact {exact}, simulated {mean} ({z:.2} sd)", spec.target, spec.strategy, spec.n, spec.k);
}

#[test]
fn minimum_degree_matches_oracle() {
    for l in 1..=2 {
        for n in 2..=6 {
            for k in 1..=3 {
                within_four_sigma(&TrialSpec::new(Target::MinDegree(l), n, k, TRIALS, 1000 + n as u64 * 10 + k as u64));
            }
        }
    }
}

#[test]
fn matching_matches_oracle() {
    for n in [2, 4, 6] {
        for k in 1..=3 {
            within_four_sigma(&TrialSpec::new(Target::PerfectMatching, n, k, TRIALS, 2000 + n as u64 * 10 + k as u64));
        }
    }
}

#[test]
fn other_policies_match_oracle() {
    let trials = 200_000;
    let mut spec = TrialSpec::new(Target::MinDegree(2), 5, 2, trials, 3);
    spec.tie_break = TieBreak::UniformRandom;
    spec.square_tie_break = TieBreak::UniformRandom;
    within_four_sigma(&spec);
    spec.tie_break = TieBreak::LowestIndex;
    within_four_sigma(&spec);
    within_four_sigma(&TrialSpec::new(Target::MinDegree(1), 5, 1, trials, 4).with_strategy(StrategyKind::UniformCircle));
    within_four_sigma(&TrialSpec::new(Target::PerfectMatching, 4, 2, trials, 5).with_strategy(StrategyKind::GreedyMatching));
    let mut spec = TrialSpec::new(Target::PerfectMatching, 4, 2, trials, 6);
    spec.square_tie_break = TieBreak::UniformRandom;
    within_four_sigma(&spec);
}
