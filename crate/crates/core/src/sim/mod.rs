//! Deterministic fixed-step driving simulator and scenario corpus.

pub mod baseline;
pub mod collision;
pub mod corpus;
pub mod runner;
pub mod scenario;
pub mod world;

pub use runner::{run_scenario, Outcome, RunResult, RunStatus, SimParams, TickTrace};
pub use scenario::Scenario;
pub use world::{step_world, World};
