//! Experiment descriptions.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ode::Property;
use crate::process::{LoopDegree, ProcessConfig, TieBreak};
use crate::strategies::StrategyKind;

/// The property a strategy is trying to reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Minimum degree at least `l`.
    MinDegree(u32),
    PerfectMatching,
    HamiltonCycle,
}

impl Target {
    pub fn property(self) -> Property {
        match self {
            Target::MinDegree(_) => Property::Mindeg,
            Target::PerfectMatching => Property::Pm,
            Target::HamiltonCycle => Property::Ham,
        }
    }

    /// Strategy used when none is named.
    pub fn default_strategy(self) -> StrategyKind {
        match self {
            Target::MinDegree(_) => StrategyKind::Greedy,
            Target::PerfectMatching => StrategyKind::Matching,
            Target::HamiltonCycle => StrategyKind::Hamilton,
        }
    }

    pub fn supports(self, s: StrategyKind) -> bool {
        use StrategyKind::*;
        match self {
            Target::MinDegree(_) => matches!(s, Greedy | UniformCircle | MaxDegreeCircle | TwoPhase),
            Target::PerfectMatching => matches!(s, Matching | GreedyMatching),
            Target::HamiltonCycle => matches!(s, Hamilton | GreedyPath),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::MinDegree(l) => write!(f, "mindeg{l}"),
            Target::PerfectMatching => f.write_str("pm"),
            Target::HamiltonCycle => f.write_str("ham"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    /// `mindeg<l>` (plain `mindeg` means `l = 1`), `pm` or `ham`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" | "perfect_matching" => return Ok(Target::PerfectMatching),
            "ham" | "hamilton_cycle" => return Ok(Target::HamiltonCycle),
            _ => {}
        }
        let Some(rest) = s.strip_prefix("mindeg") else {
            return Err(Error::Parse(format!("unknown target `{s}` (expected mindeg<l>, pm or ham)")));
        };
        if rest.is_empty() {
            return Ok(Target::MinDegree(1));
        }
        match rest.parse::<u32>() {
            Ok(l) if l >= 1 && !rest.starts_with('+') => Ok(Target::MinDegree(l)),
            _ => Err(Error::Parse(format!("bad minimum-degree target `{s}`"))),
        }
    }
}

/// One batch of independent trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub target: Target,
    pub strategy: StrategyKind,
    pub tie_break: TieBreak,
    pub square_tie_break: TieBreak,
    pub loop_degree: LoopDegree,
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    /// Covered fraction at which the matching or path phase stops:
    /// `X >= threshold * n`. Ignored for minimum-degree targets.
    pub threshold: f64,
    /// Trajectory sample spacing in rounds; `None` records nothing.
    pub stride: Option<u64>,
    /// Full invariant check after every round.
    pub validate: bool,
}

/// Default covered fraction for the matching and path phases.
pub const DEFAULT_THRESHOLD: f64 = 0.99;

impl TrialSpec {
    pub fn new(target: Target, n: usize, k: usize, trials: u64, seed: u64) -> Self {
        Self {
            target,
            strategy: target.default_strategy(),
            tie_break: TieBreak::AvoidSquareThenLowest,
            square_tie_break: TieBreak::LowestIndex,
            loop_degree: LoopDegree::CountsTwo,
            n,
            k,
            trials,
            seed,
            threshold: DEFAULT_THRESHOLD,
            stride: None,
            validate: false,
        }
    }

    pub fn with_strategy(mut self, s: StrategyKind) -> Self {
        self.strategy = s;
        self
    }

    /// Record trajectories every `n / 100` rounds (at least every round).
    pub fn with_default_stride(mut self) -> Self {
        self.stride = Some((self.n as u64 / 100).max(1));
        self
    }

    pub fn process_config(&self) -> ProcessConfig {
        ProcessConfig {
            tie_break: self.tie_break,
            square_tie_break: self.square_tie_break,
            loop_degree: self.loop_degree,
            ..ProcessConfig::new(self.n, self.k, self.seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.process_config().validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidConfig(format!("threshold {} must lie in (0, 1)", self.threshold)));
        }
        if !self.target.supports(self.strategy) {
            return Err(Error::InvalidConfig(format!("strategy `{}` does not target `{}`", self.strategy, self.target)));
        }
        if self.stride == Some(0) {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        match self.target {
            Target::PerfectMatching if !self.n.is_multiple_of(2) => Err(Error::OddVertexCount(self.n)),
            Target::HamiltonCycle if self.n < 3 => Err(Error::InvalidConfig(format!("a Hamilton cycle needs n >= 3, got {}", self.n))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_parse_and_print() {
        for s in ["mindeg1", "mindeg3", "pm", "ham"] {
            assert_eq!(s.parse::<Target>().unwrap().to_string(), s);
        }
        assert_eq!("mindeg".parse::<Target>().unwrap(), Target::MinDegree(1));
        for bad in ["mindeg0", "mindeg+2", "mindegx", "matching", ""] {
            assert!(bad.parse::<Target>().is_err(), "{bad}");
        }
    }

    #[test]
    fn validation_catches_bad_specs() {
        let ok = TrialSpec::new(Target::MinDegree(1), 10, 1, 5, 0);
        assert!(ok.validate().is_ok());
        assert!(TrialSpec { n: 0, ..ok.clone() }.validate().is_err());
        assert!(TrialSpec { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(TrialSpec { threshold: 1.0, ..ok.clone() }.validate().is_err());
        assert!(ok.clone().with_strategy(StrategyKind::Matching).validate().is_err());
        assert!(TrialSpec::new(Target::PerfectMatching, 7, 1, 1, 0).validate().is_err());
        assert!(TrialSpec::new(Target::HamiltonCycle, 2, 1, 1, 0).validate().is_err());
    }
}
