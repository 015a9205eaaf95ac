//! `cri` command line: run, batch, compare, validate.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::config::{Config, TraceVerbosity};
use crate::error::{Error, Result};
use crate::metrics::{runtime_profile, write_series, RouteMetrics, SuiteMetrics, TimedRun};
use crate::report::{compare_suites, ReportHeader, SuiteReport};
use crate::sim::runner::write_trace;
use crate::sim::{run_scenario, RunResult, Scenario};

pub const SCENARIO_EXT: &str = "scn";

#[derive(Debug, Parser)]
#[command(
    name = "cri",
    version,
    about = "Direction-aware collision risk index and scenario harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    Fp,
    All,
}

#[derive(Debug, clap::Args)]
pub struct ConfigArgs {
    /// TOML configuration file; missing keys take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one key after the file, e.g. `--set risk.speed_ref=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<Config> {
        Config::resolve(self.config.as_deref(), &self.overrides)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and print an outcome summary.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "on")]
        cri: Switch,
        #[command(flatten)]
        config: ConfigArgs,
        /// Write the per-tick trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run every scenario in a directory with and without CRI.
    Batch {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        filter: Filter,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        parallel: Option<usize>,
        /// Reserved; the simulator has no stochastic inputs.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        config: ConfigArgs,
        /// Directory for report.json, report.txt and runtime.txt.
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Compare the suite rows of two batch reports.
    Compare { a: PathBuf, b: PathBuf },
    /// Check a scenario, a directory of scenarios or a .toml config.
    Validate { path: PathBuf },
}

/// Parses `args` and executes; returns what should go to stdout.
pub fn execute<I, T>(args: I) -> std::result::Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    dispatch(cli.command).map_err(CliError::Run)
}

#[derive(Debug)]
pub enum CliError {
    Usage(clap::Error),
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Run(_) => 1,
        }
    }
}

pub fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Run {
            scenario,
            cri,
            config,
            trace,
        } => cmd_run(&scenario, cri == Switch::On, &config.resolve()?, trace.as_deref()),
        Command::Batch {
            dir,
            filter,
            parallel,
            seed: _,
            config,
            out,
        } => {
            let batch = cmd_batch(&dir, filter, parallel, &config.resolve()?)?;
            batch.write(&out)?;
            Ok(format!("{}\n{}", batch.report.render(), batch.runtime))
        }
        Command::Compare { a, b } => cmd_compare(&a, &b),
        Command::Validate { path } => cmd_validate(&path),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn cmd_run(path: &Path, cri_enabled: bool, config: &Config, trace: Option<&Path>) -> Result<String> {
    let scenario = Scenario::load(path)?;
    let run = run_scenario(&scenario, cri_enabled, &config.cri(), &config.sim)?;
    if let Some(trace_path) = trace {
        let file = fs::File::create(trace_path).map_err(io_err(trace_path))?;
        let out = std::io::BufWriter::new(file);
        match config.trace.verbosity {
            TraceVerbosity::Full => write_trace(out, &run.trace),
            TraceVerbosity::Series => write_series(out, &run.trace),
        }
        .map_err(io_err(trace_path))?;
    }
    let dt = config.sim.dt.unwrap_or(scenario.dt);
    let metrics = RouteMetrics::from_run(
        &run.outcome,
        &run.trace,
        scenario.failure_prone,
        dt,
        &config.scoring,
    )?;
    Ok(summary(&run, &metrics))
}

fn summary(run: &RunResult, m: &RouteMetrics) -> String {
    let o = &run.outcome;
    let peak = run.trace.iter().map(|t| t.cri_final).fold(0.0, f64::max);
    let mut out = String::new();
    let mut line = |k: &str, v: String| out += &format!("{k:<16}{v}\n");
    line("scenario", o.scenario.clone());
    line("cri", if o.cri_enabled { "on" } else { "off" }.into());
    line("status", format!("{:?}", o.status).to_lowercase());
    line("ticks", o.ticks.to_string());
    line("time_s", format!("{:.2}", o.duration));
    line("distance_m", format!("{:.1}", o.distance_km * 1000.0));
    line("completion", format!("{:.3}", m.completion));
    line("collisions", o.collisions.to_string());
    line("peak_cri", format!("{peak:.3}"));
    line("composed_score", format!("{:.2}", m.composed_score));
    line(
        "mean_abs_jerk",
        m.jerk
            .map_or_else(|| "n/a".into(), |j| format!("{:.3}", j.mean_abs)),
    );
    for (i, t) in run.trace.iter().enumerate() {
        for npc in &t.collisions {
            out += &format!("collision       tick {i} t={:.2} with {npc}\n", t.t);
        }
    }
    out
}

/// Scenario files in `dir`, sorted by file name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == SCENARIO_EXT))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Scenario(format!(
            "{}: no .{SCENARIO_EXT} scenario files",
            dir.display()
        )));
    }
    Ok(files)
}

pub struct Batch {
    pub report: SuiteReport,
    /// Wall-clock table; kept apart from the deterministic report.
    pub runtime: String,
}

impl Batch {
    pub fn write(&self, out: &Path) -> Result<()> {
        fs::create_dir_all(out).map_err(io_err(out))?;
        for (name, body) in [
            ("report.json", self.report.to_json()),
            ("report.txt", self.report.render()),
            ("runtime.txt", self.runtime.clone()),
        ] {
            let path = out.join(name);
            fs::write(&path, body).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

pub fn cmd_batch(dir: &Path, filter: Filter, parallel: Option<usize>, config: &Config) -> Result<Batch> {
    let mut scenarios = scenario_files(dir)?
        .iter()
        .map(Scenario::load)
        .collect::<Result<Vec<_>>>()?;
    if filter == Filter::Fp {
        scenarios.retain(|s| s.failure_prone);
        if scenarios.is_empty() {
            return Err(Error::Scenario(format!(
                "{}: no failure-prone scenarios",
                dir.display()
            )));
        }
    }
    scenarios.sort_by(|a, b| a.name.cmp(&b.name));
    if let Some(w) = scenarios.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(Error::Scenario(format!(
            "duplicate scenario name {:?}",
            w[0].name
        )));
    }

    let cri = config.cri();
    let job = |s: &Scenario| -> Result<(RunResult, RunResult)> {
        Ok((
            run_scenario(s, false, &cri, &config.sim)?,
            run_scenario(s, true, &cri, &config.sim)?,
        ))
    };
    let runs: Vec<(RunResult, RunResult)> = match parallel {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| scenarios.par_iter().map(job).collect::<Result<_>>())?,
        None => scenarios.par_iter().map(job).collect::<Result<_>>()?,
    };

    let mut base = Vec::new();
    let mut with = Vec::new();
    for (s, (b, c)) in scenarios.iter().zip(&runs) {
        let dt = config.sim.dt.unwrap_or(s.dt);
        base.push(RouteMetrics::from_run(
            &b.outcome,
            &b.trace,
            s.failure_prone,
            dt,
            &config.scoring,
        )?);
        with.push(RouteMetrics::from_run(
            &c.outcome,
            &c.trace,
            s.failure_prone,
            dt,
            &config.scoring,
        )?);
    }

    let fp = |rs: &[RouteMetrics]| rs.iter().filter(|r| r.failure_prone).cloned().collect::<Vec<_>>();
    let (fp_base, fp_with) = (fp(&base), fp(&with));
    let mut pairs: Vec<(&str, &[RouteMetrics], &[RouteMetrics])> = Vec::new();
    if filter == Filter::All {
        pairs.push(("ALL", &base, &with));
    }
    if !fp_base.is_empty() {
        pairs.push(("FP", &fp_base, &fp_with));
    }
    let header = ReportHeader::new(&config.hash(), &config.to_toml());
    let report = SuiteReport::build(header, &pairs)?;

    let timed = |cri_side: bool| -> Vec<TimedRun> {
        scenarios
            .iter()
            .zip(&runs)
            .map(|(s, (b, c))| TimedRun {
                scenario: &s.name,
                trace: if cri_side { &c.trace } else { &b.trace },
            })
            .collect()
    };
    let runtime = runtime_profile(&timed(false), &timed(true))?.render();
    Ok(Batch { report, runtime })
}

pub fn load_report(path: &Path) -> Result<SuiteReport> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Comparison(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn cmd_compare(a: &Path, b: &Path) -> Result<String> {
    let (ra, rb) = (load_report(a)?, load_report(b)?);
    let tag = |p: &Path| {
        p.file_stem()
            .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
    };
    let (ta, tb) = (tag(a), tag(b));
    let mut out = format!(
        "{ta}: config {}\n{tb}: config {}\n",
        ra.header.config_hash, rb.header.config_hash
    );
    if ra.header.config_hash == rb.header.config_hash {
        out += "configs are identical\n";
    }
    let mut matched = 0;
    for row in &ra.table {
        let Some(other) = rb.table.iter().find(|r| r.label == row.label) else {
            continue;
        };
        let relabel = |s: &SuiteMetrics, t: &str| SuiteMetrics {
            label: format!("{t}:{}", s.label),
            ..s.clone()
        };
        let c = compare_suites(&relabel(row, &ta), &relabel(other, &tb))?;
        out += &format!("\n{}\n{}", row.label, c.render());
        matched += 1;
    }
    if matched == 0 {
        return Err(Error::Comparison("reports share no suite rows".into()));
    }
    Ok(out)
}

pub fn cmd_validate(path: &Path) -> Result<String> {
    if path.is_dir() {
        let files = scenario_files(path)?;
        for f in &files {
            Scenario::load(f)?;
        }
        return Ok(format!("ok: {} scenarios in {}\n", files.len(), path.display()));
    }
    if path.extension().is_some_and(|x| x == "toml") {
        let c = Config::load(path)?;
        return Ok(format!("ok: config {} ({})\n", path.display(), c.hash()));
    }
    let s = Scenario::load(path)?;
    Ok(format!("ok: scenario {} ({})\n", s.name, path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "cri",
            "batch",
            "dir",
            "--filter",
            "fp",
            "--parallel",
            "2",
            "--seed",
            "7",
            "--set",
            "risk.alpha=0.5",
        ])
        .unwrap();
        match cli.command {
            Command::Batch {
                filter,
                parallel,
                seed,
                config,
                ..
            } => {
                assert_eq!(filter, Filter::Fp);
                assert_eq!(parallel, Some(2));
                assert_eq!(seed, Some(7));
                assert_eq!(config.resolve().unwrap().risk.alpha, 0.5);
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["cri", "run", "x.scn", "--cri", "maybe"]).is_err());
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_batch(dir.path(), Filter::All, None, &Config::default())
            .err()
            .unwrap();
        assert!(err.to_string().contains("no .scn"), "{err}");
    }
}
