//! Distance between simulated and limiting trajectories.

use serde::{Deserialize, Serialize};

use super::run::{run_trial_outcomes, TrialRecord, TrialSummary};
use super::spec::{Target, TrialSpec};
use crate::error::{Error, Result};
use crate::ode::{solve_ham, solve_min_degree, solve_pm, IntegratorConfig, Trajectory, HAM_X_STOP, PM_EPS};
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub coords: Vec<String>,
    /// Sup-distance of each trial.
    pub per_trial: Vec<f64>,
    pub mean: f64,
    pub max: f64,
}

/// `max_t max_i |emp_i(t) - ode_i(t)|` over the samples of `emp`, with the
/// limiting trajectory interpolated at each sample time.
pub fn sup_distance(emp: &Trajectory, ode: &Trajectory) -> Result<f64> {
    if emp.coords != ode.coords {
        return Err(Error::InvalidConfig(format!("coordinates {:?} and {:?} do not correspond", emp.coords, ode.coords)));
    }
    let mut sup = 0.0f64;
    for (s, v) in emp.s.iter().zip(&emp.values) {
        let w = ode.at(*s);
        for (a, b) in v.iter().zip(&w) {
            sup = sup.max((a - b).abs());
        }
    }
    Ok(sup)
}

/// The limiting trajectory for the strategy of `spec`.
pub fn reference_trajectory(spec: &TrialSpec, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let k = spec.k as u32;
    match (spec.target, spec.strategy) {
        (Target::MinDegree(l), StrategyKind::Greedy) => Ok(solve_min_degree(k, l, cfg)?.trajectory),
        (Target::PerfectMatching, StrategyKind::Matching) => Ok(solve_pm(k, PM_EPS, cfg)?.trajectory),
        (Target::HamiltonCycle, StrategyKind::Hamilton) => Ok(solve_ham(k, HAM_X_STOP, cfg)?.trajectory),
        (t, s) => Err(Error::InvalidConfig(format!("no limiting system for strategy `{s}` on `{t}`"))),
    }
}

fn measure(spec: &TrialSpec, ode: &Trajectory) -> Result<(TrajectoryReport, Vec<TrialRecord>)> {
    let mut spec = spec.clone();
    if spec.stride.is_none() {
        spec = spec.with_default_stride();
    }
    let outcomes = run_trial_outcomes(&spec)?;
    let mut per_trial = Vec::with_capacity(outcomes.len());
    let mut records = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let emp = o
            .trajectory
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig(format!("strategy `{}` records no trajectory", spec.strategy)))?;
        per_trial.push(sup_distance(emp, ode)?);
        records.push(o.record);
    }
    let report = TrajectoryReport {
        coords: ode.coords.clone(),
        mean: per_trial.iter().sum::<f64>() / per_trial.len() as f64,
        max: per_trial.iter().copied().fold(0.0, f64::max),
        per_trial,
    };
    Ok((report, records))
}

/// Run `spec` (sampling every `n / 100` rounds unless a stride is set) and
/// measure each trial against `ode`.
pub fn trajectory_check(spec: &TrialSpec, ode: &Trajectory) -> Result<TrajectoryReport> {
    Ok(measure(spec, ode)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub summary: TrialSummary,
    pub trajectory: TrajectoryReport,
    /// Limiting constant for the hitting time (`tau` or `u_k`).
    pub ode_constant: f64,
    /// The limiting trajectory, scaled like the samples.
    pub ode: Trajectory,
}

/// Simulate and compare against the limiting system in one pass.
pub fn compare(spec: &TrialSpec, cfg: &IntegratorConfig) -> Result<CompareReport> {
    spec.validate()?;
    let ode = reference_trajectory(spec, cfg)?;
    let ode_constant = match spec.target {
        // time at which the limiting covered fraction reaches the threshold
        Target::PerfectMatching | Target::HamiltonCycle => ode.first_reaching(0, spec.threshold).unwrap_or(f64::NAN),
        Target::MinDegree(_) => ode.end().unwrap_or(f64::NAN),
    };
    let (trajectory, records) = measure(spec, &ode)?;
    let mut summary = TrialSummary::from_records(spec.n, records);
    summary.sup_distance = Some(trajectory.max);
    Ok(CompareReport {
        summary,
        trajectory,
        ode_constant,
        ode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_itself_is_zero() {
        let ode = solve_min_degree(2, 2, &IntegratorConfig::default()).unwrap().trajectory;
        assert_eq!(sup_distance(&ode, &ode).unwrap(), 0.0);
        let mut other = Trajectory::new(&["x", "r"]);
        other.push(0.0, vec![0.0, 0.0]);
        assert!(sup_distance(&other, &ode).is_err());
    }

    #[test]
    fn moderate_run_tracks_the_system() {
        let spec = TrialSpec::new(Target::MinDegree(2), 20_000, 1, 2, 3);
        let report = compare(&spec, &IntegratorConfig::default()).unwrap();
        assert!(report.trajectory.max < 0.02, "{:?}", report.trajectory);
        assert!((report.summary.mean_h_over_n - report.ode_constant).abs() < 0.03);
    }

    #[test]
    fn baselines_have_no_reference() {
        let spec = TrialSpec::new(Target::MinDegree(1), 10, 1, 1, 0).with_strategy(StrategyKind::UniformCircle);
        assert!(reference_trajectory(&spec, &IntegratorConfig::default()).is_err());
    }
}
