//! Route and suite evaluation metrics: collisions per route and per km,
//! composed score, jerk statistics and per-cycle runtime.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Outcome, RunStatus, TickTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JerkStats {
    pub mean_abs: f64,
    pub std_abs: f64,
    pub max_abs: f64,
}

/// Jerk of a uniformly sampled speed trace by double differencing.
///
/// Returns `None` (metric undefined) for fewer than three samples or a
/// non-positive step. The spread is the population standard deviation.
pub fn jerk_stats(speed: &[f64], dt: f64) -> Option<JerkStats> {
    if speed.len() < 3 || !(dt > 0.0) {
        return None;
    }
    let accel: Vec<f64> = speed.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
    let jerk: Vec<f64> = accel.windows(2).map(|w| ((w[1] - w[0]) / dt).abs()).collect();
    let n = jerk.len() as f64;
    let mean_abs = jerk.iter().sum::<f64>() / n;
    let var = jerk.iter().map(|j| (j - mean_abs).powi(2)).sum::<f64>() / n;
    let max_abs = jerk.iter().copied().fold(0.0, f64::max);
    Some(JerkStats {
        mean_abs,
        std_abs: var.sqrt(),
        max_abs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoringParams {
    /// Multiplicative score factor per vehicle collision.
    pub collision_penalty: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            collision_penalty: 0.60,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<()> {
        let p = self.collision_penalty;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Config(format!(
                "scoring.collision_penalty must be in (0, 1], got {p}"
            )));
        }
        Ok(())
    }
}

/// `(CS, SP)`: CS = 100 · completion · penalty^collisions, SP = 1 − penalty^collisions.
pub fn composed_score(completion: f64, collisions: usize, params: &ScoringParams) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&completion) {
        return Err(Error::Domain(format!(
            "completion must be in [0, 1], got {completion}"
        )));
    }
    let factor = params.collision_penalty.powi(collisions as i32);
    Ok((100.0 * completion * factor, 1.0 - factor))
}

/// Mean per-tick cost of each pipeline stage, microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RuntimeSample {
    pub baseline_us: f64,
    pub init_us: f64,
    pub reception_us: f64,
    pub adaptation_us: f64,
    pub step_us: f64,
}

impl RuntimeSample {
    fn mean(trace: &[TickTrace]) -> Self {
        if trace.is_empty() {
            return Self::default();
        }
        let n = trace.len() as f64;
        let sum = |f: fn(&TickTrace) -> f64| trace.iter().map(f).sum::<f64>() / n;
        Self {
            baseline_us: sum(|t| t.timing.baseline_us),
            init_us: sum(|t| t.timing.init_us),
            reception_us: sum(|t| t.timing.reception_us),
            adaptation_us: sum(|t| t.timing.adaptation_us),
            step_us: sum(|t| t.timing.step_us),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteMetrics {
    pub scenario: String,
    pub failure_prone: bool,
    pub cri_enabled: bool,
    pub status: RunStatus,
    pub collisions: usize,
    pub distance_km: f64,
    pub completion: f64,
    pub composed_score: f64,
    pub score_penalty: f64,
    pub jerk: Option<JerkStats>,
    /// Wall-clock; never part of a deterministic report body.
    #[serde(skip)]
    pub runtime: RuntimeSample,
}

impl RouteMetrics {
    pub fn from_run(
        outcome: &Outcome,
        trace: &[TickTrace],
        failure_prone: bool,
        dt: f64,
        scoring: &ScoringParams,
    ) -> Result<Self> {
        let completion = outcome.completion();
        let (composed_score, score_penalty) = composed_score(completion, outcome.collisions, scoring)?;
        let speed: Vec<f64> = trace.iter().map(|t| t.speed).collect();
        Ok(Self {
            scenario: outcome.scenario.clone(),
            failure_prone,
            cri_enabled: outcome.cri_enabled,
            status: outcome.status,
            collisions: outcome.collisions,
            distance_km: outcome.distance_km,
            completion,
            composed_score,
            score_penalty,
            jerk: jerk_stats(&speed, dt),
            runtime: RuntimeSample::mean(trace),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionMetrics {
    pub cpr: f64,
    /// `None` when no distance was driven.
    pub cpk: Option<f64>,
}

pub fn collision_metrics(routes: &[RouteMetrics]) -> Result<CollisionMetrics> {
    if routes.is_empty() {
        return Err(Error::Domain("collision metrics need at least one route".into()));
    }
    let collisions: usize = routes.iter().map(|r| r.collisions).sum();
    let km: f64 = routes.iter().map(|r| r.distance_km).sum();
    Ok(CollisionMetrics {
        cpr: collisions as f64 / routes.len() as f64,
        cpk: (km > 0.0).then(|| collisions as f64 / km),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteMetrics {
    pub label: String,
    pub routes: usize,
    pub scenarios: Vec<String>,
    pub collisions: usize,
    pub distance_km: f64,
    pub cpr: f64,
    pub cpk: Option<f64>,
    pub cs: f64,
    pub sp: f64,
    /// Fraction of routes that hit their duration limit.
    pub rt: f64,
    pub maj: Option<f64>,
    pub saj: Option<f64>,
    pub mj: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl SuiteMetrics {
    /// Averages per-route values; jerk means skip routes where jerk is undefined.
    pub fn from_routes(label: &str, routes: &[RouteMetrics]) -> Result<Self> {
        let cm = collision_metrics(routes)?;
        let n = routes.len() as f64;
        let mut scenarios: Vec<String> = routes.iter().map(|r| r.scenario.clone()).collect();
        scenarios.sort();
        let jerks = || routes.iter().filter_map(|r| r.jerk);
        Ok(Self {
            label: label.to_owned(),
            routes: routes.len(),
            scenarios,
            collisions: routes.iter().map(|r| r.collisions).sum(),
            distance_km: routes.iter().map(|r| r.distance_km).sum(),
            cpr: cm.cpr,
            cpk: cm.cpk,
            cs: routes.iter().map(|r| r.composed_score).sum::<f64>() / n,
            sp: routes.iter().map(|r| r.score_penalty).sum::<f64>() / n,
            rt: routes.iter().filter(|r| r.status == RunStatus::Timeout).count() as f64 / n,
            maj: mean(jerks().map(|j| j.mean_abs)),
            saj: mean(jerks().map(|j| j.std_abs)),
            mj: mean(jerks().map(|j| j.max_abs)),
        })
    }

    /// Metric values in report order.
    pub fn values(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("CpR", Some(self.cpr)),
            ("CpK", self.cpk),
            ("CS", Some(self.cs)),
            ("SP", Some(self.sp)),
            ("RT", Some(self.rt)),
            ("MAJ", self.maj),
            ("SAJ", self.saj),
            ("MJ", self.mj),
        ]
    }
}

/// Mean cost per decision cycle, milliseconds, in the shape of a
/// component-level runtime table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeProfile {
    pub reception_ms: f64,
    pub adaptation_ms: f64,
    pub init_ms: f64,
    pub baseline_step_ms: f64,
    pub cri_step_ms: f64,
}

impl RuntimeProfile {
    pub fn overhead_ms(&self) -> f64 {
        self.cri_step_ms - self.baseline_step_ms
    }

    pub fn overhead_pct(&self) -> f64 {
        if self.baseline_step_ms > 0.0 {
            100.0 * self.overhead_ms() / self.baseline_step_ms
        } else {
            0.0
        }
    }

    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("CRI Reception (ms)", format!("{:.4}", self.reception_ms)),
            ("Control Adaptation (ms)", format!("{:.4}", self.adaptation_ms)),
            ("Controller Initialization (ms)", format!("{:.4}", self.init_ms)),
            ("RunStep baseline (ms)", format!("{:.4}", self.baseline_step_ms)),
            ("RunStep with CRI (ms)", format!("{:.4}", self.cri_step_ms)),
            ("Overhead (ms)", format!("{:.4}", self.overhead_ms())),
            ("Overhead (%)", format!("{:.2}", self.overhead_pct())),
        ]
    }

    pub fn render(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out += &format!("{k:<width$}  {v:>10}\n");
        }
        out
    }
}

/// One run's trace tagged with its scenario, for runtime pairing.
#[derive(Debug, Clone, Copy)]
pub struct TimedRun<'a> {
    pub scenario: &'a str,
    pub trace: &'a [TickTrace],
}

/// Builds the runtime profile from baseline and CRI runs of the same
/// scenarios. The baseline cycle counts only the baseline policy and the
/// world step; the CRI cycle adds initialization, reception and adaptation.
pub fn runtime_profile(baseline: &[TimedRun], cri: &[TimedRun]) -> Result<RuntimeProfile> {
    let mut a: Vec<&str> = baseline.iter().map(|r| r.scenario).collect();
    let mut b: Vec<&str> = cri.iter().map(|r| r.scenario).collect();
    a.sort_unstable();
    b.sort_unstable();
    if a.is_empty() || a != b {
        return Err(Error::Pairing(format!(
            "runtime profile needs the same scenarios on both sides (baseline {a:?}, cri {b:?})"
        )));
    }
    let base: Vec<&TickTrace> = baseline.iter().flat_map(|r| r.trace.iter()).collect();
    let with: Vec<&TickTrace> = cri.iter().flat_map(|r| r.trace.iter()).collect();
    let avg = |ts: &[&TickTrace], f: &dyn Fn(&TickTrace) -> f64| {
        if ts.is_empty() {
            0.0
        } else {
            ts.iter().map(|t| f(t)).sum::<f64>() / ts.len() as f64 / 1000.0
        }
    };
    Ok(RuntimeProfile {
        reception_ms: avg(&with, &|t| t.timing.reception_us),
        adaptation_ms: avg(&with, &|t| t.timing.adaptation_us),
        init_ms: avg(&with, &|t| t.timing.init_us),
        baseline_step_ms: avg(&base, &|t| t.timing.baseline_us + t.timing.step_us),
        cri_step_ms: avg(&with, &|t| {
            let m = &t.timing;
            m.baseline_us + m.init_us + m.reception_us + m.adaptation_us + m.step_us
        }),
    })
}

/// Plot-ready per-tick columns: time, speed, aggregated CRI and mode.
pub fn write_series<W: Write>(mut out: W, trace: &[TickTrace]) -> std::io::Result<()> {
    writeln!(out, "t,speed,cri_final,mode")?;
    for t in trace {
        writeln!(out, "{:.2},{},{},{:?}", t.t, t.speed, t.cri_final, t.mode)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn route(collisions: usize, km: f64) -> RouteMetrics {
        RouteMetrics {
            scenario: format!("r{collisions}-{km}"),
            failure_prone: false,
            cri_enabled: false,
            status: RunStatus::Completed,
            collisions,
            distance_km: km,
            completion: 1.0,
            composed_score: 100.0,
            score_penalty: 0.0,
            jerk: None,
            runtime: RuntimeSample::default(),
        }
    }

    #[test]
    fn jerk_examples() {
        assert_eq!(
            jerk_stats(&[4.0; 10], 0.05),
            Some(JerkStats {
                mean_abs: 0.0,
                std_abs: 0.0,
                max_abs: 0.0
            })
        );
        let ramp = jerk_stats(&[0.0, 1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!((ramp.mean_abs, ramp.std_abs, ramp.max_abs), (0.0, 0.0, 0.0));
        let step = jerk_stats(&[0.0, 0.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!((step.mean_abs, step.std_abs, step.max_abs), (1.0, 0.0, 1.0));
        assert_eq!(jerk_stats(&[1.0, 2.0], 0.05), None);
    }

    #[test]
    fn jerk_ignores_speed_offset() {
        let v = [0.0, 0.3, 1.1, 1.2, 2.5, 2.4, 3.0];
        let shifted: Vec<f64> = v.iter().map(|x| x + 7.5).collect();
        let a = jerk_stats(&v, 0.1).unwrap();
        let b = jerk_stats(&shifted, 0.1).unwrap();
        assert_abs_diff_eq!(a.mean_abs, b.mean_abs, epsilon = 1e-9);
        assert_abs_diff_eq!(a.std_abs, b.std_abs, epsilon = 1e-9);
        assert_abs_diff_eq!(a.max_abs, b.max_abs, epsilon = 1e-9);
    }

    #[test]
    fn collision_examples() {
        let cm = collision_metrics(&[route(1, 0.1), route(0, 0.1)]).unwrap();
        assert_abs_diff_eq!(cm.cpr, 0.5);
        assert_abs_diff_eq!(cm.cpk.unwrap(), 5.0, epsilon = 1e-12);
        let clean = collision_metrics(&[route(0, 0.3), route(0, 0.2)]).unwrap();
        assert_eq!((clean.cpr, clean.cpk), (0.0, Some(0.0)));
        let one = collision_metrics(&[route(2, 0.2)]).unwrap();
        assert_eq!(one.cpr, 2.0);
        assert_abs_diff_eq!(one.cpk.unwrap(), 10.0, epsilon = 1e-12);
        assert_eq!(collision_metrics(&[route(1, 0.0)]).unwrap().cpk, None);
        assert!(collision_metrics(&[]).is_err());
    }

    #[test]
    fn composed_score_examples() {
        let p = ScoringParams::default();
        assert_eq!(composed_score(1.0, 0, &p).unwrap(), (100.0, 0.0));
        let (cs, sp) = composed_score(1.0, 1, &p).unwrap();
        assert_abs_diff_eq!(cs, 60.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sp, 0.4, epsilon = 1e-12);
        let (cs, sp) = composed_score(0.5, 2, &p).unwrap();
        assert_abs_diff_eq!(cs, 18.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sp, 0.64, epsilon = 1e-12);
        assert!(composed_score(1.2, 0, &p).is_err());
    }

    #[test]
    fn composed_score_identity() {
        let p = ScoringParams::default();
        for n in 0..6 {
            for c in [0.0, 0.25, 0.7, 1.0] {
                let (cs, sp) = composed_score(c, n, &p).unwrap();
                assert_abs_diff_eq!(cs + 100.0 * c * sp, 100.0 * c, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn overhead_from_table_totals() {
        let p = RuntimeProfile {
            reception_ms: 0.020,
            adaptation_ms: 0.006,
            init_ms: 0.005,
            baseline_step_ms: 70.53,
            cri_step_ms: 74.13,
        };
        assert_abs_diff_eq!(p.overhead_ms(), 3.60, epsilon = 1e-9);
        let rows = p.rows();
        assert_eq!(rows[0].1, "0.0200");
        assert_eq!(rows[1].1, "0.0060");
        assert_eq!(rows[2].1, "0.0050");
        assert_eq!(rows[5].1, "3.6000");
        assert_eq!(rows[6].1, "5.10");
    }

    #[test]
    fn unpaired_runtime_is_rejected() {
        let a = [TimedRun {
            scenario: "a",
            trace: &[],
        }];
        let b = [TimedRun {
            scenario: "b",
            trace: &[],
        }];
        assert!(matches!(runtime_profile(&a, &b), Err(Error::Pairing(_))));
    }
}
