//! Limiting differential-equation systems and their numerical solution.

pub mod integrator;
pub mod solve;
pub mod systems;
pub mod tables;

pub use integrator::{integrate, Crossing, Event, IntegratorConfig, IntegratorStats, OdeSystem, Solution};
pub use solve::{solve_ham, solve_min_degree, solve_pm, HamSolution, PhaseSolution, PmSolution, Trajectory, HAM_X_STOP, PM_CLEANUP, PM_EPS};
pub use systems::{rhs_ham, rhs_min_degree, rhs_pm};
pub use tables::{emit_tables, Kind, Property, TableOptions, TableRecord};
