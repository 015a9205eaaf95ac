//! Direction-aware collision risk index (CRI) with risk-adaptive control,
//! plus a deterministic kinematic scenario simulator and evaluation metrics.

pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod geometry;
pub mod math;
pub mod metrics;
pub mod report;
pub mod risk;
pub mod sector;
pub mod sim;

pub use error::{Error, Result};
