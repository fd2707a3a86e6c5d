//! CSV and JSON output of trial results.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use super::run::TrialSummary;
use super::spec::TrialSpec;
use crate::error::Result;
use crate::ode::{Property, Trajectory};
use crate::strategies::StrategyKind;

/// One CSV row per trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRow {
    pub property: Property,
    pub strategy: StrategyKind,
    pub n: usize,
    pub k: usize,
    pub trial: u64,
    pub hitting_round: u64,
    pub threshold_round: u64,
    pub completion_rounds: u64,
    pub seed: u64,
}

pub fn trial_rows(spec: &TrialSpec, summary: &TrialSummary) -> Vec<TrialRow> {
    summary
        .records
        .iter()
        .map(|r| TrialRow {
            property: spec.target.property(),
            strategy: spec.strategy,
            n: spec.n,
            k: spec.k,
            trial: r.trial,
            hitting_round: r.hitting_round,
            threshold_round: r.threshold_round,
            completion_rounds: r.completion_rounds,
            seed: spec.seed,
        })
        .collect()
}

pub fn write_trials_csv<W: Write>(spec: &TrialSpec, summary: &TrialSummary, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for row in trial_rows(spec, summary) {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_trials_csv<R: Read>(r: R) -> Result<Vec<TrialRow>> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize().map(|row| row.map_err(Into::into)).collect()
}

/// Spec echo, summary statistics and, optionally, trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: TrialSpec,
    pub summary: TrialSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<Trajectory>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectories: Vec<Trajectory>,
}

pub fn write_report<W: Write>(report: &Report, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, report)?;
    Ok(())
}

pub fn read_report<R: Read>(r: R) -> Result<Report> {
    Ok(serde_json::from_reader(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run::run_trials;
    use crate::harness::spec::Target;

    #[test]
    fn csv_has_the_documented_columns_and_is_stable() {
        let spec = TrialSpec::new(Target::PerfectMatching, 100, 2, 4, 8);
        let summary = run_trials(&spec).unwrap();
        let mut a = Vec::new();
        write_trials_csv(&spec, &summary, &mut a).unwrap();
        let text = String::from_utf8(a.clone()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "property,strategy,n,k,trial,hitting_round,threshold_round,completion_rounds,seed"
        );
        assert_eq!(text.lines().count(), 5);
        let again = run_trials(&spec).unwrap();
        let mut b = Vec::new();
        write_trials_csv(&spec, &again, &mut b).unwrap();
        assert_eq!(a, b);
        let rows = read_trials_csv(&a[..]).unwrap();
        assert_eq!(rows, trial_rows(&spec, &summary));
    }

    #[test]
    fn report_round_trips() {
        let spec = TrialSpec::new(Target::MinDegree(2), 200, 3, 5, 1);
        let report = Report {
            summary: run_trials(&spec).unwrap(),
            spec,
            ode: None,
            trajectories: Vec::new(),
        };
        let mut buf = Vec::new();
        write_report(&report, &mut buf).unwrap();
        assert_eq!(read_report(&buf[..]).unwrap(), report);
    }
}
