//! Paired comparison of two strategies on the same target.

use serde::{Deserialize, Serialize};

use super::run::run_trials;
use super::spec::TrialSpec;
use super::stats::{mean_sd, normal_upper_tail};
use crate::error::{Error, Result};
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub strategy: StrategyKind,
    pub baseline: StrategyKind,
    pub trials: u64,
    pub mean_strategy: f64,
    pub mean_baseline: f64,
    /// Mean of `H(baseline) - H(strategy)` over paired trials.
    pub mean_difference: f64,
    pub se_difference: f64,
    pub z: f64,
    /// One-sided p-value for "the strategy is not faster".
    pub p_value: f64,
}

/// Run `spec` and the same spec with `baseline` on identical trial seeds,
/// and test whether `spec.strategy` hits sooner on average.
pub fn dominance_experiment(spec: &TrialSpec, baseline: StrategyKind) -> Result<DominanceReport> {
    if !spec.target.supports(baseline) {
        return Err(Error::InvalidConfig(format!("baseline `{baseline}` does not target `{}`", spec.target)));
    }
    let a = run_trials(spec)?;
    let b = run_trials(&spec.clone().with_strategy(baseline))?;
    let ha = a.hitting_rounds();
    let hb = b.hitting_rounds();
    let diffs: Vec<f64> = ha.iter().zip(&hb).map(|(x, y)| *y as f64 - *x as f64).collect();
    let (mean, sd) = mean_sd(&diffs);
    let se = sd / (diffs.len() as f64).sqrt();
    let (z, p_value) = if se > 0.0 {
        let z = mean / se;
        (z, normal_upper_tail(z))
    } else if mean > 0.0 {
        (f64::INFINITY, 0.0)
    } else if mean < 0.0 {
        (f64::NEG_INFINITY, 1.0)
    } else {
        (0.0, 0.5)
    };
    let avg = |h: &[u64]| h.iter().map(|&x| x as f64).sum::<f64>() / h.len() as f64;
    Ok(DominanceReport {
        strategy: spec.strategy,
        baseline,
        trials: spec.trials,
        mean_strategy: avg(&ha),
        mean_baseline: avg(&hb),
        mean_difference: mean,
        se_difference: se,
        z,
        p_value,
    })
}
