//! Monte Carlo experiments: hitting-time estimation, comparison with the
//! limiting systems, paired dominance tests, the exact small-instance
//! oracle and CSV/JSON export.

pub mod dominance;
pub mod export;
pub mod oracle;
pub mod run;
pub mod spec;
pub mod stats;
pub mod trajectory;

pub use dominance::{dominance_experiment, DominanceReport};
pub use export::{read_report, read_trials_csv, trial_rows, write_report, write_trials_csv, Report, TrialRow};
pub use oracle::{exact_small_oracle, OracleReport, OracleResult, OracleSpec};
pub use run::{run_trial_outcomes, run_trials, TrialOutcome, TrialRecord, TrialSummary};
pub use spec::{Target, TrialSpec, DEFAULT_THRESHOLD};
pub use stats::{case_frequency_test, chi_square, ChiSquareResult};
pub use trajectory::{compare, reference_trajectory, sup_distance, trajectory_check, CompareReport, TrajectoryReport};
