//! Property tests over random inputs, states and runs.

use std::collections::BTreeSet;

use proptest::prelude::*;

use ksemi::harness::{chi_square, Target, TrialSpec};
use ksemi::indexed_set::IndexedSet;
use ksemi::ode::tables::parse_range;
use ksemi::rng::trial_rng;
use ksemi::strategies::hamilton::{ham_run, verify_cycle, HamState};
use ksemi::strategies::matching::{pm_run, PmState};
use ksemi::strategies::mindeg::{run_min_degree, CircleRule};
use ksemi::strategies::{RunOptions, StrategyKind};
use ksemi::{GraphState, LoopDegree, ProcessConfig, TieBreak};

fn tie_break() -> impl Strategy<Value = TieBreak> {
    prop_oneof![Just(TieBreak::LowestIndex), Just(TieBreak::AvoidSquareThenLowest), Just(TieBreak::UniformRandom)]
}

const VALIDATE: RunOptions = RunOptions { stride: Some(7), validate: true };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ranges_round_trip(a in 0u32..1000, len in 0u32..1000) {
        let b = a + len;
        prop_assert_eq!(parse_range(&format!("{a}..{b}")).unwrap(), (a, b));
        prop_assert_eq!(parse_range(&format!("{a}..={b}")).unwrap(), (a, b));
        if len > 0 {
            let reversed = format!("{b}..{a}");
            prop_assert!(parse_range(&reversed).is_err());
        }
    }

    #[test]
    fn targets_round_trip(l in 1u32..100) {
        for t in [Target::MinDegree(l), Target::PerfectMatching, Target::HamiltonCycle] {
            prop_assert_eq!(t.to_string().parse::<Target>().unwrap(), t);
        }
    }

    #[test]
    fn indexed_set_matches_a_model(ops in prop::collection::vec((any::<bool>(), 0usize..40), 0..200)) {
        let mut s = IndexedSet::new(40);
        let mut model = BTreeSet::new();
        for (ins, v) in ops {
            if ins {
                prop_assert_eq!(s.insert(v), model.insert(v));
            } else {
                prop_assert_eq!(s.remove(v), model.remove(&v));
            }
            prop_assert_eq!(s.len(), model.len());
        }
        let got: BTreeSet<usize> = s.iter().collect();
        prop_assert_eq!(got, model);
    }

    #[test]
    fn degree_buckets_stay_consistent(n in 1usize..40, edges in prop::collection::vec((0usize..1000, 0usize..1000), 0..200), counts_one in any::<bool>()) {
        let mut cfg = ProcessConfig::new(n, 1, 0);
        cfg.loop_degree = if counts_one { LoopDegree::CountsOne } else { LoopDegree::CountsTwo };
        let mut g = GraphState::new(cfg).unwrap();
        let mut loops = 0u64;
        for (a, b) in edges {
            let (u, v) = (a % n + 1, b % n + 1);
            loops += (u == v) as u64;
            g.add_edge(u, v);
        }
        prop_assert!(g.validate().is_ok());
        let sum: u64 = (1..=n).map(|v| g.degree(v) as u64).sum();
        let expected = if counts_one { 2 * g.t() - loops } else { 2 * g.t() };
        prop_assert_eq!(sum, expected);
        let min = (1..=n).map(|v| g.degree(v)).min().unwrap();
        prop_assert_eq!(g.min_degree(), min);
    }

    #[test]
    fn greedy_runs_hit_the_target(n in 2usize..80, k in 1usize..5, l in 1u32..4, tb in tie_break(), stb in tie_break(), seed in any::<u64>()) {
        let mut cfg = ProcessConfig::new(n, k, seed);
        cfg.tie_break = tb;
        cfg.square_tie_break = stb;
        let mut g = GraphState::new(cfg).unwrap();
        let tr = run_min_degree(&mut g, CircleRule::MinDegree, l, &mut trial_rng(seed, 0), VALIDATE).unwrap();
        prop_assert!(g.min_degree() >= l);
        prop_assert!(tr.breakpoints.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*tr.breakpoints.last().unwrap(), tr.hitting_round);
        // every round adds degree 2, so n * l / 2 rounds are necessary
        prop_assert!(2 * tr.hitting_round >= n as u64 * l as u64);
    }

    #[test]
    fn matching_runs_end_perfect(half in 1usize..40, k in 1usize..5, eps in 0.0f64..0.5, stb in tie_break(), seed in any::<u64>()) {
        let n = 2 * half;
        let mut cfg = ProcessConfig::new(n, k, seed).with_edges();
        cfg.square_tie_break = stb;
        let mut g = GraphState::new(cfg).unwrap();
        let mut pm = PmState::new(n);
        let tr = pm_run(&mut g, &mut pm, eps, &mut trial_rng(seed, 1), VALIDATE).unwrap();
        prop_assert!(pm.is_perfect());
        prop_assert_eq!(tr.total_rounds(), g.t());
        for v in 1..=n {
            let m = tr.matching[v - 1];
            prop_assert!(m != v && tr.matching[m - 1] == v);
        }
    }

    #[test]
    fn path_runs_close_a_cycle(n in 3usize..60, k in 1usize..5, x_stop in 0.3f64..1.0, stb in tie_break(), seed in any::<u64>()) {
        let mut cfg = ProcessConfig::new(n, k, seed).with_edges();
        cfg.square_tie_break = stb;
        let mut g = GraphState::new(cfg).unwrap();
        let mut h = HamState::new(n);
        let tr = ham_run(&mut g, &mut h, x_stop, &mut trial_rng(seed, 2), VALIDATE).unwrap();
        prop_assert!(verify_cycle(&tr.cycle, &g).is_ok());
        prop_assert!(tr.samples.windows(2).all(|w| w[0].path <= w[1].path));
    }

    #[test]
    fn chi_square_p_is_a_probability(obs in prop::collection::vec(1u64..1000, 2..8)) {
        let m = obs.len();
        let probs = vec![1.0 / m as f64; m];
        let r = chi_square(&obs, &probs).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert!(r.statistic >= 0.0);
        prop_assert_eq!(r.dof, m - 1);
    }

    #[test]
    fn specs_validate_strategy_targets(n in 1usize..50, k in 1usize..5) {
        for (t, s) in [(Target::MinDegree(1), StrategyKind::Matching), (Target::PerfectMatching, StrategyKind::Greedy), (Target::HamiltonCycle, StrategyKind::TwoPhase)] {
            prop_assert!(TrialSpec::new(t, n, k, 1, 0).with_strategy(s).validate().is_err());
        }
    }
}
