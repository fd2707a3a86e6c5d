//! Simulation and numerical laboratory for the k-semi-random graph process.
//!
//! In every round of the k-process, `k` vertices (squares) are drawn
//! independently and uniformly from `[n]`; the player keeps one of them and
//! joins it to a vertex of their choice (the circle). This crate provides
//!
//! * [`process`]: the evolving multigraph with O(1) minimum-degree queries,
//! * [`strategies`]: the adaptive player strategies for minimum degree,
//!   perfect matchings and Hamiltonian cycles,
//! * [`ode`]: the differential-equation systems that describe those
//!   strategies in the limit, with an adaptive integrator and event location,
//! * [`harness`]: seeded Monte Carlo experiments, an exact small-instance
//!   oracle, dominance tests and CSV/JSON export.

#![forbid(unsafe_code)]

pub mod error;
pub mod harness;
pub mod indexed_set;
pub mod ode;
pub mod process;
pub mod rng;
pub mod strategies;

pub use error::{Error, Result};
pub use process::{GraphState, LoopDegree, ProcessConfig, TieBreak};
