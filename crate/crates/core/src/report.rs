//! Baseline-versus-CRI comparison tables, as JSON documents and aligned text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{RouteMetrics, SuiteMetrics};

/// Relative change in percent; `None` when the baseline is zero and the
/// other side is not, or when either side is undefined.
pub fn percent_delta(baseline: Option<f64>, other: Option<f64>) -> Option<f64> {
    let (b, o) = (baseline?, other?);
    if b == 0.0 {
        return (o == 0.0).then_some(0.0);
    }
    Some(100.0 * (o - b) / b.abs())
}

/// One decimal with an explicit sign, e.g. `-19.8%`, `+17.0%`, `0.0%`.
pub fn format_delta(delta: Option<f64>) -> String {
    match delta {
        None => "n/a".into(),
        Some(d) => {
            let rounded = (d * 10.0).round() / 10.0;
            if rounded == 0.0 {
                "0.0%".into()
            } else {
                format!("{rounded:+.1}%")
            }
        }
    }
}

fn format_value(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.3}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub metric: String,
    pub baseline: Option<f64>,
    pub cri: Option<f64>,
    pub delta_pct: Option<f64>,
    pub delta: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub cri: String,
    pub rows: Vec<MetricDelta>,
}

pub fn compare_suites(baseline: &SuiteMetrics, cri: &SuiteMetrics) -> Result<Comparison> {
    if baseline.scenarios != cri.scenarios {
        let only_base: Vec<&String> = baseline
            .scenarios
            .iter()
            .filter(|s| !cri.scenarios.contains(s))
            .collect();
        let only_cri: Vec<&String> = cri
            .scenarios
            .iter()
            .filter(|s| !baseline.scenarios.contains(s))
            .collect();
        return Err(Error::Comparison(format!(
            "scenario sets differ: only in {}: {only_base:?}; only in {}: {only_cri:?}",
            baseline.label, cri.label
        )));
    }
    let rows = baseline
        .values()
        .into_iter()
        .zip(cri.values())
        .map(|((metric, b), (_, c))| {
            let delta_pct = percent_delta(b, c);
            MetricDelta {
                metric: metric.into(),
                baseline: b,
                cri: c,
                delta_pct,
                delta: format_delta(delta_pct),
            }
        })
        .collect();
    Ok(Comparison {
        baseline: baseline.label.clone(),
        cri: cri.label.clone(),
        rows,
    })
}

impl Comparison {
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<6} {:>12} {:>12} {:>9}\n",
            "metric", self.baseline, self.cri, "delta"
        );
        for r in &self.rows {
            out += &format!(
                "{:<6} {:>12} {:>12} {:>9}\n",
                r.metric,
                format_value(r.baseline),
                format_value(r.cri),
                r.delta
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    /// Effective configuration after defaults, file and flags.
    pub config: String,
}

impl ReportHeader {
    pub fn new(config_hash: &str, config: &str) -> Self {
        Self {
            tool: "cri".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash.into(),
            config: config.into(),
        }
    }
}

/// Suite report: summary rows, per-subset comparisons and per-route detail.
/// Contains no wall-clock data, so equal inputs give byte-equal output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub header: ReportHeader,
    pub table: Vec<SuiteMetrics>,
    pub comparisons: Vec<Comparison>,
    pub routes: Vec<RouteMetrics>,
}

impl SuiteReport {
    /// `pairs` are `(subset, baseline routes, cri routes)`, e.g. FP then ALL.
    /// Rows are labelled `Baseline_<subset>` and `CRI_<subset>`.
    pub fn build(header: ReportHeader, pairs: &[(&str, &[RouteMetrics], &[RouteMetrics])]) -> Result<Self> {
        let mut table = Vec::new();
        let mut comparisons = Vec::new();
        let mut routes = Vec::new();
        for (subset, base, cri) in pairs {
            let b = SuiteMetrics::from_routes(&format!("Baseline_{subset}"), base)?;
            let c = SuiteMetrics::from_routes(&format!("CRI_{subset}"), cri)?;
            comparisons.push(compare_suites(&b, &c)?);
            table.push(b);
            table.push(c);
        }
        // per-route detail once, from the widest subset
        if let Some((_, base, cri)) = pairs.iter().max_by_key(|(_, b, _)| b.len()) {
            routes.extend(base.iter().cloned());
            routes.extend(cri.iter().cloned());
            routes.sort_by(|a, b| (&a.scenario, a.cri_enabled).cmp(&(&b.scenario, b.cri_enabled)));
        }
        Ok(Self {
            header,
            table,
            comparisons,
            routes,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "# {} {}  config {}\n\n",
            self.header.tool, self.header.version, self.header.config_hash
        );
        out += &format!(
            "{:<14} {:>6} {:>7} {:>8} {:>8} {:>6} {:>6} {:>8} {:>8} {:>8}\n",
            "run", "routes", "CpR", "CpK", "CS", "SP", "RT", "MAJ", "SAJ", "MJ"
        );
        let opt = |v: Option<f64>, p: usize| v.map_or_else(|| "n/a".into(), |v| format!("{v:.p$}"));
        for s in &self.table {
            out += &format!(
                "{:<14} {:>6} {:>7.3} {:>8} {:>8.2} {:>6.3} {:>6.3} {:>8} {:>8} {:>8}\n",
                s.label,
                s.routes,
                s.cpr,
                opt(s.cpk, 3),
                s.cs,
                s.sp,
                s.rt,
                opt(s.maj, 2),
                opt(s.saj, 2),
                opt(s.mj, 2)
            );
        }
        for c in &self.comparisons {
            out += &format!("\n{} vs {}\n", c.baseline, c.cri);
            out += &c.render();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn suite(label: &str, cpk: f64, cs: f64) -> SuiteMetrics {
        SuiteMetrics {
            label: label.into(),
            routes: 2,
            scenarios: vec!["a".into(), "b".into()],
            collisions: 1,
            distance_km: 0.2,
            cpr: 0.5,
            cpk: Some(cpk),
            cs,
            sp: 0.4,
            rt: 0.0,
            maj: Some(1.0),
            saj: Some(2.0),
            mj: None,
        }
    }

    #[test]
    fn delta_rendering() {
        assert_eq!(format_delta(percent_delta(Some(12.37), Some(9.92))), "-19.8%");
        assert_eq!(format_delta(percent_delta(Some(44.96), Some(52.62))), "+17.0%");
        assert_eq!(format_delta(percent_delta(Some(3.0), Some(3.0))), "0.0%");
        assert_eq!(format_delta(percent_delta(Some(0.0), Some(0.0))), "0.0%");
        assert_eq!(format_delta(percent_delta(Some(0.0), Some(1.0))), "n/a");
        assert_eq!(format_delta(percent_delta(None, Some(1.0))), "n/a");
    }

    #[test]
    fn identical_suites_have_zero_deltas() {
        let a = suite("Baseline_ALL", 5.0, 60.0);
        let c = compare_suites(&a, &a).unwrap();
        for r in &c.rows {
            assert!(r.delta == "0.0%" || r.delta == "n/a", "{r:?}");
        }
    }

    #[test]
    fn deltas_recompute_from_inputs() {
        let a = suite("Baseline_ALL", 12.37, 44.96);
        let b = suite("CRI_ALL", 9.92, 52.62);
        let c = compare_suites(&a, &b).unwrap();
        for r in &c.rows {
            if let (Some(x), Some(y), Some(d)) = (r.baseline, r.cri, r.delta_pct) {
                if x == 0.0 {
                    continue;
                }
                assert_abs_diff_eq!(d, 100.0 * (y - x) / x.abs(), epsilon = 1e-12);
            }
        }
        let cpk = c.rows.iter().find(|r| r.metric == "CpK").unwrap();
        assert_eq!(cpk.delta, "-19.8%");
    }

    #[test]
    fn mismatched_scenarios_are_rejected() {
        let a = suite("Baseline_ALL", 1.0, 1.0);
        let mut b = suite("CRI_ALL", 1.0, 1.0);
        b.scenarios.push("c".into());
        assert!(matches!(compare_suites(&a, &b), Err(Error::Comparison(_))));
    }
}
