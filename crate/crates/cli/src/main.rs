//! Command line front end: worst-case replays, random-instance sweeps, the
//! camera Monte Carlo study, and the structural self-check.
//!
//! Every command prints a `key=value` header echoing its configuration, the
//! package version, and the output schema, so any saved output identifies
//! the run that produced it.  For a fixed invocation the bytes written to
//! stdout and to `--csv`/`--json`/`--hist` files are identical across runs
//! and across worker counts.
//!
//! Exit codes: 0 success, 1 violated bound or failed property, 2 invalid
//! parameters or unusable files, 3 evaluation budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greedypass_core::harness::{
    run_check, run_monte_carlo, run_sweep, run_worst_case, CheckReport, HistogramData,
    MonteCarloConfig, MonteCarloReport, SweepConfig, SweepReport, WorstCaseReport,
};
use greedypass_core::instances::{CameraScenarioSpec, WorstCaseSpec, WorstCaseVariant};
use greedypass_core::io::SCHEMA_VERSION;
use greedypass_core::{Error, EvalBudget};
use serde::Serialize;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name of the environment variable overriding the evaluation budget.
const BUDGET_VAR: &str = "GREEDYPASS_EVAL_BUDGET";

#[derive(Parser)]
#[command(
    name = "greedypass",
    version,
    about = "Sequential distributed subset selection with message passing",
    long_about = "Replay worst-case constructions, sweep random instances against the \
                  closed-form guarantees, run the camera estimation study, or self-check \
                  the library's structural properties.\n\nSet GREEDYPASS_EVAL_BUDGET to \
                  cap the number of objective evaluations any command may spend."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an adversarial construction and compare the achieved ratio
    /// with its closed form, exactly.
    Worstcase {
        /// Construction family: `a` (few messages) or `b` (many messages).
        #[arg(long)]
        variant: String,
        /// Number of agents (at least two).
        #[arg(long)]
        n: usize,
        /// Selections per agent.
        #[arg(long)]
        k: usize,
        /// Messages per agent.
        #[arg(long)]
        m: usize,
        /// Write the full report as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run all policies and the exact optimum on seeded random coverage
    /// instances and check every closed-form bound.
    Sweep {
        /// Number of instances.
        #[arg(long)]
        instances: u64,
        /// Master seed; instance i uses a seed derived from (seed, i).
        #[arg(long)]
        seed: u64,
        /// Number of agents per instance.
        #[arg(long)]
        n: usize,
        /// Selections per agent.
        #[arg(long)]
        k: usize,
        /// Messages per agent.
        #[arg(long)]
        m: usize,
        /// Write one CSV row per instance to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Camera estimation study: seeded scenarios, both policies, and the
    /// histogram of improvement ratios.
    Montecarlo {
        /// Number of scenarios to draw.
        #[arg(long)]
        trials: u64,
        /// Master seed; trial i uses a seed derived from (seed, i).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of camera vehicles (agents).
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Selections per agent.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Messages per agent.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Write one CSV row per trial to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the histogram and summary fractions as JSON to this file.
        #[arg(long)]
        hist: Option<PathBuf>,
    },
    /// Run the structural property suites on fresh seeded instances.
    Check {
        /// Largest ground size checked exhaustively (1..=24).
        #[arg(long, default_value_t = 14)]
        exhaustive_cap: usize,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::BudgetExceeded(_) => 3,
        Error::NotPositiveDefinite(_) => 1,
    }
}

fn budget_from_env() -> Result<EvalBudget, Error> {
    match std::env::var(BUDGET_VAR) {
        Ok(raw) => {
            let limit: u64 = raw.trim().parse().map_err(|_| {
                Error::InvalidSpec(format!(
                    "{BUDGET_VAR} must be a nonnegative integer, got {raw:?}"
                ))
            })?;
            Ok(EvalBudget::uniform(limit))
        }
        Err(std::env::VarError::NotPresent) => Ok(EvalBudget::default()),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::InvalidSpec(format!(
            "{BUDGET_VAR} is not valid unicode"
        ))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)?;
    Ok(())
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn run_worstcase_cmd(
    variant: &str,
    n: usize,
    k: usize,
    m: usize,
    json: Option<&Path>,
) -> Result<bool, Error> {
    let variant: WorstCaseVariant = variant.parse()?;
    let spec = WorstCaseSpec { variant, n_agents: n, k, m };
    let report = run_worst_case(spec, budget_from_env()?)?;
    print!("{}", worstcase_text(&report));
    if let Some(path) = json {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(report.exact_match)
}

fn worstcase_text(report: &WorstCaseReport) -> String {
    let spec = report.spec;
    let b = &report.bounds;
    let mut out = String::new();
    out.push_str(&format!("greedypass worstcase version={VERSION} schema={SCHEMA_VERSION}\n"));
    out.push_str(&format!(
        "config variant={} n={} k={} m={}\n",
        spec.variant, spec.n_agents, spec.k, spec.m
    ));
    out.push_str(&format!("f_augmented={}\n", report.f_augmented));
    out.push_str(&format!("f_nominal={}\n", report.f_nominal));
    out.push_str(&format!("opt={}\n", report.opt_value));
    out.push_str(&format!("achieved={}/{}\n", report.achieved_num, report.achieved_den));
    out.push_str(&format!("closed_form={}/{}\n", report.expected_num, report.expected_den));
    out.push_str(&format!("exact_match={}\n", report.exact_match));
    out.push_str(&format!("opt_ratio_lower={}\n", b.opt_ratio_lower));
    out.push_str(&format!("opt_ratio_upper={}\n", b.opt_ratio_upper));
    out.push_str(&format!("improvement_lower={}\n", b.improvement_lower));
    out.push_str(&format!("improvement_upper={}\n", b.improvement_upper));
    out.push_str(&format!("opt_profiles_enumerated={}\n", report.opt_profiles_enumerated));
    out
}

fn run_sweep_cmd(
    instances: u64,
    seed: u64,
    n: usize,
    k: usize,
    m: usize,
    csv: Option<&Path>,
) -> Result<bool, Error> {
    let mut config = SweepConfig::new(instances, seed, n, k, m);
    config.budget = budget_from_env()?;
    let report = run_sweep(config)?;
    print!("{}", sweep_text(&report));
    if let Some(path) = csv {
        write_file(path, &sweep_csv(&report))?;
    }
    Ok(report.total_violations == 0)
}

fn sweep_text(report: &SweepReport) -> String {
    let c = &report.config;
    let b = &report.bounds;
    let mut out = String::new();
    out.push_str(&format!("greedypass sweep version={VERSION} schema={SCHEMA_VERSION}\n"));
    out.push_str(&format!(
        "config instances={} seed={} n={} k={} m={} max_elems_per_agent={} n_cells={} \
         weight_min={} weight_max={}\n",
        c.n_instances, c.seed, c.n_agents, c.k, c.m, c.max_elems_per_agent, c.n_cells,
        c.weight_min, c.weight_max
    ));
    out.push_str(&format!(
        "bounds opt_ratio_lower={} opt_ratio_upper={} improvement_lower={} \
         improvement_upper={} alpha={}\n",
        b.opt_ratio_lower, b.opt_ratio_upper, b.improvement_lower, b.improvement_upper, b.alpha
    ));
    out.push_str(&format!("instances_run={}\n", report.rows.len()));
    out.push_str(&format!("total_violations={}\n", report.total_violations));
    out
}

fn sweep_csv(report: &SweepReport) -> String {
    let c = &report.config;
    let b = &report.bounds;
    let mut out = String::new();
    out.push_str(&format!(
        "# greedypass sweep version={VERSION} schema={SCHEMA_VERSION} instances={} seed={} \
         n={} k={} m={} max_elems_per_agent={} n_cells={} weight_min={} weight_max={}\n",
        c.n_instances, c.seed, c.n_agents, c.k, c.m, c.max_elems_per_agent, c.n_cells,
        c.weight_min, c.weight_max
    ));
    out.push_str(
        "index,instance_seed,f_nominal,f_independent,f_augmented,f_opt,ratio_nominal,\
         ratio_augmented,improvement,opt_ratio_lower,opt_ratio_upper,improvement_lower,\
         improvement_upper,premise_slack,conclusion_slack,violations\n",
    );
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.index,
            r.instance_seed,
            r.f_nominal,
            r.f_independent,
            r.f_augmented,
            r.f_opt,
            r.ratio_nominal,
            r.ratio_augmented,
            r.improvement,
            b.opt_ratio_lower,
            b.opt_ratio_upper,
            b.improvement_lower,
            b.improvement_upper,
            opt_field(r.premise_slack),
            opt_field(r.conclusion_slack),
            r.violations
        ));
    }
    out
}

/// Histogram output file: the distribution plus everything needed to read it.
#[derive(Serialize)]
struct HistogramFile<'a> {
    version: &'static str,
    schema: u32,
    config: &'a MonteCarloConfig,
    improvement_lower: f64,
    improvement_upper: f64,
    bin_edges: Vec<f64>,
    histogram: &'a HistogramData,
}

fn run_montecarlo_cmd(
    trials: u64,
    seed: u64,
    n: usize,
    k: usize,
    m: usize,
    csv: Option<&Path>,
    hist: Option<&Path>,
) -> Result<bool, Error> {
    let mut config = MonteCarloConfig::new(trials, seed);
    config.scenario = CameraScenarioSpec { n_vehicles: n, k, m, ..config.scenario };
    config.budget = budget_from_env()?;
    let report = run_monte_carlo(config)?;
    print!("{}", montecarlo_text(&report));
    if let Some(path) = csv {
        write_file(path, &montecarlo_csv(&report))?;
    }
    if let Some(path) = hist {
        let file = HistogramFile {
            version: VERSION,
            schema: SCHEMA_VERSION,
            config: &report.config,
            improvement_lower: report.improvement_lower,
            improvement_upper: report.improvement_upper,
            bin_edges: report.histogram.bin_edges(),
            histogram: &report.histogram,
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(report.n_outside_bounds == 0)
}

fn montecarlo_text(report: &MonteCarloReport) -> String {
    let c = &report.config;
    let s = &c.scenario;
    let h = &report.histogram;
    let mut out = String::new();
    out.push_str(&format!("greedypass montecarlo version={VERSION} schema={SCHEMA_VERSION}\n"));
    out.push_str(&format!(
        "config trials={} seed={} n={} k={} m={} images_per_vehicle={} n_targets={}\n",
        c.n_trials, c.seed, s.n_vehicles, s.k, s.m, s.images_per_vehicle, s.n_targets
    ));
    out.push_str(&format!(
        "interval improvement_lower={} improvement_upper={}\n",
        report.improvement_lower, report.improvement_upper
    ));
    out.push_str(&format!("n_outside_bounds={}\n", report.n_outside_bounds));
    out.push_str(&format!("n_equal_one={}\n", h.n_equal_one));
    out.push_str(&format!("fraction_equal_one={}\n", h.fraction_equal_one));
    out.push_str(&format!("fraction_above_one={}\n", h.fraction_above_one));
    out.push_str(&format!("fraction_below_one={}\n", h.fraction_below_one));
    out
}

fn montecarlo_csv(report: &MonteCarloReport) -> String {
    let c = &report.config;
    let s = &c.scenario;
    let mut out = String::new();
    out.push_str(&format!(
        "# greedypass montecarlo version={VERSION} schema={SCHEMA_VERSION} trials={} seed={} \
         n={} k={} m={} images_per_vehicle={} n_targets={}\n",
        c.n_trials, c.seed, s.n_vehicles, s.k, s.m, s.images_per_vehicle, s.n_targets
    ));
    out.push_str("trial,scenario_seed,f_nominal,f_augmented,improvement\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial, r.scenario_seed, r.f_nominal, r.f_augmented, r.improvement
        ));
    }
    out
}

fn run_check_cmd(exhaustive_cap: usize) -> Result<bool, Error> {
    let report = run_check(exhaustive_cap, 0, budget_from_env()?)?;
    print!("{}", check_text(exhaustive_cap, &report));
    if !report.all_passed {
        println!("{}", serde_json::to_string(&failure_report(&report))?);
    }
    Ok(report.all_passed)
}

fn check_text(exhaustive_cap: usize, report: &CheckReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("greedypass check version={VERSION} schema={SCHEMA_VERSION}\n"));
    out.push_str(&format!("config exhaustive_cap={exhaustive_cap} seed=0\n"));
    for suite in &report.suites {
        let verdict = if suite.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("suite {}: {verdict} [{}]\n", suite.name, suite.detail));
    }
    out.push_str(&format!("all_passed={}\n", report.all_passed));
    out
}

/// Machine-readable failure summary printed when any suite fails.
#[derive(Serialize)]
struct FailureReport<'a> {
    version: &'static str,
    failed_suites: Vec<&'a str>,
    report: &'a CheckReport,
}

fn failure_report(report: &CheckReport) -> FailureReport<'_> {
    FailureReport {
        version: VERSION,
        failed_suites: report
            .suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect(),
        report,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Worstcase { variant, n, k, m, json } => {
            run_worstcase_cmd(variant, *n, *k, *m, json.as_deref())
        }
        Command::Sweep { instances, seed, n, k, m, csv } => {
            run_sweep_cmd(*instances, *seed, *n, *k, *m, csv.as_deref())
        }
        Command::Montecarlo { trials, seed, n, k, m, csv, hist } => {
            run_montecarlo_cmd(*trials, *seed, *n, *k, *m, csv.as_deref(), hist.as_deref())
        }
        Command::Check { exhaustive_cap } => run_check_cmd(*exhaustive_cap),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
