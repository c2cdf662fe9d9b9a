//! Experiment runners: worst-case verification, randomized property sweeps,
//! the camera Monte Carlo study, and the self-check suite.
//!
//! Runners return plain serializable reports; formatting them is the
//! caller's job.  Everything is deterministic for a fixed config: per-trial
//! seeds derive from the master seed and the trial index, and parallel runs
//! collect rows in index order.

use num::rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bound_report, brute_force_opt, check_alpha_bound, improvement_bounds, BoundReport,
};
use crate::error::{Error, Result};
use crate::instances::{
    derive_seed, gen_camera_scenario, gen_random_coverage, gen_worst_case, CameraScenarioSpec,
    RandomCoverageSpec, WorstCaseSpec, WorstCaseVariant,
};
use crate::oracle::{
    best_subset, check_monotone, check_normalized, check_submodular, marginal, CheckMode,
    EvalBudget, SetFunction,
};
use crate::policies::{run_policy, PolicyKind, PolicySpec};
use crate::set::ElementSet;
use crate::tol::{BOUND_TOL, RATIO_ONE_TOL, VALUE_EPS};

/// Outcome of one worst-case construction versus the exact optimum.
#[derive(Debug, Clone, Serialize)]
pub struct WorstCaseReport {
    pub spec: WorstCaseSpec,
    pub f_augmented: u64,
    pub f_nominal: u64,
    pub opt_value: u64,
    /// Achieved ratio in lowest terms.
    pub achieved_num: u64,
    pub achieved_den: u64,
    /// Closed-form ratio the construction is built to hit, in lowest terms.
    pub expected_num: u64,
    pub expected_den: u64,
    pub exact_match: bool,
    pub bounds: BoundReport,
    pub opt_profiles_enumerated: u64,
}

/// Builds the instance, replays the augmented policy, solves for the true
/// optimum, and compares the achieved ratio with the closed form in exact
/// rational arithmetic.
pub fn run_worst_case(spec: WorstCaseSpec, budget: EvalBudget) -> Result<WorstCaseReport> {
    let wc = gen_worst_case(spec)?;
    let augmented = run_policy(&wc.instance, PolicySpec::new(PolicyKind::Augmented), budget)?;
    let nominal = run_policy(&wc.instance, PolicySpec::new(PolicyKind::Nominal), budget)?;
    let opt = brute_force_opt(&wc.instance, budget)?;
    let opt_value = wc
        .coverage
        .eval_exact(opt.profile.iter().fold(ElementSet::empty(), |acc, x| acc.union(*x)));
    if opt_value == 0 {
        return Err(Error::InvalidSpec(
            "worst-case optimum evaluated to zero, the construction is broken".into(),
        ));
    }
    let f_augmented = wc.coverage.eval_exact(augmented.selected());
    let f_nominal = wc.coverage.eval_exact(nominal.selected());
    let achieved = Ratio::new(f_augmented, opt_value);
    Ok(WorstCaseReport {
        spec,
        f_augmented,
        f_nominal,
        opt_value,
        achieved_num: *achieved.numer(),
        achieved_den: *achieved.denom(),
        expected_num: *wc.expected_ratio.numer(),
        expected_den: *wc.expected_ratio.denom(),
        exact_match: achieved == wc.expected_ratio,
        bounds: bound_report(spec.n_agents, spec.k, spec.m)?,
        opt_profiles_enumerated: opt.enumerated,
    })
}

/// Configuration of a randomized property sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_instances: u64,
    pub seed: u64,
    pub n_agents: usize,
    pub k: usize,
    pub m: usize,
    pub max_elems_per_agent: usize,
    pub n_cells: usize,
    pub weight_min: u64,
    pub weight_max: u64,
    pub budget: EvalBudget,
}

impl SweepConfig {
    pub fn new(n_instances: u64, seed: u64, n_agents: usize, k: usize, m: usize) -> Self {
        SweepConfig {
            n_instances,
            seed,
            n_agents,
            k,
            m,
            max_elems_per_agent: 6,
            n_cells: 8,
            weight_min: 1,
            weight_max: 3,
            budget: EvalBudget::default(),
        }
    }
}

/// One random instance's results and bound checks.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: u64,
    pub instance_seed: u64,
    pub f_nominal: f64,
    pub f_independent: f64,
    pub f_augmented: f64,
    pub f_opt: f64,
    /// Sequential greedy over the optimum.
    pub ratio_nominal: f64,
    /// Augmented policy over the optimum.
    pub ratio_augmented: f64,
    /// Augmented over sequential greedy.
    pub improvement: f64,
    /// Smallest certificate premise slack; absent without messages.
    pub premise_slack: Option<f64>,
    /// Certificate conclusion slack; absent when the premise fails.
    pub conclusion_slack: Option<f64>,
    /// Number of violated bounds on this instance.
    pub violations: u32,
}

/// Sweep results plus the closed-form bounds they were checked against.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub bounds: BoundReport,
    pub rows: Vec<SweepRow>,
    pub total_violations: u64,
}

fn sweep_row(config: &SweepConfig, bounds: &BoundReport, index: u64) -> Result<SweepRow> {
    let instance_seed = derive_seed(config.seed, index);
    let gen = gen_random_coverage(RandomCoverageSpec {
        n_agents: config.n_agents,
        max_elems_per_agent: config.max_elems_per_agent,
        n_cells: config.n_cells,
        weight_min: config.weight_min,
        weight_max: config.weight_max,
        k: config.k,
        m: config.m,
        seed: instance_seed,
    })?;
    let budget = config.budget;
    let nominal = run_policy(&gen.instance, PolicySpec::new(PolicyKind::Nominal), budget)?;
    let independent =
        run_policy(&gen.instance, PolicySpec::new(PolicyKind::Independent), budget)?;
    let augmented = run_policy(&gen.instance, PolicySpec::new(PolicyKind::Augmented), budget)?;
    let opt = brute_force_opt(&gen.instance, budget)?;

    let exact = |s: ElementSet| gen.coverage.eval_exact(s);
    let f_ng = exact(nominal.selected());
    let f_ag = exact(augmented.selected());
    let f_opt =
        exact(opt.profile.iter().fold(ElementSet::empty(), |acc, x| acc.union(*x)));
    let ratio = |num: u64| {
        if f_opt == 0 {
            1.0
        } else {
            num as f64 / f_opt as f64
        }
    };
    let improvement = if f_ng == 0 { 1.0 } else { f_ag as f64 / f_ng as f64 };

    let mut violations = 0u32;
    // The message-free sequential guarantee, in exact integers.
    if 2 * f_ng < f_opt {
        violations += 1;
    }
    if ratio(f_ag) < bounds.opt_ratio_lower - BOUND_TOL {
        violations += 1;
    }
    if improvement < bounds.improvement_lower - BOUND_TOL
        || improvement > bounds.improvement_upper + BOUND_TOL
    {
        violations += 1;
    }

    let mut premise_slack = None;
    let mut conclusion_slack = None;
    if config.m >= 1 && config.n_agents >= 2 {
        let alpha = (config.k as f64 / config.m as f64).max(1.0);
        let report = check_alpha_bound(&gen.instance, &augmented, &opt, alpha, budget)?;
        premise_slack = report
            .steps
            .iter()
            .map(|s| s.slack)
            .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))));
        conclusion_slack = report.conclusion.map(|c| c.slack);
        match report.conclusion {
            Some(c) if c.holds => {}
            _ => violations += 1,
        }
    }

    Ok(SweepRow {
        index,
        instance_seed,
        f_nominal: f_ng as f64,
        f_independent: exact(independent.selected()) as f64,
        f_augmented: f_ag as f64,
        f_opt: f_opt as f64,
        ratio_nominal: ratio(f_ng),
        ratio_augmented: ratio(f_ag),
        improvement,
        premise_slack,
        conclusion_slack,
        violations,
    })
}

/// Runs policies, the exact optimum, and every applicable bound check on a
/// family of seeded random instances.
pub fn run_sweep(config: SweepConfig) -> Result<SweepReport> {
    if config.n_instances == 0 {
        return Err(Error::InvalidSpec("need at least one instance".into()));
    }
    let bounds = bound_report(config.n_agents, config.k, config.m)?;
    let rows: Vec<SweepRow> = (0..config.n_instances)
        .into_par_iter()
        .map(|index| sweep_row(&config, &bounds, index))
        .collect::<Result<_>>()?;
    let total_violations = rows.iter().map(|r| r.violations as u64).sum();
    Ok(SweepReport { config, bounds, rows, total_violations })
}

const HIST_LO: f64 = 0.5;
const HIST_HI: f64 = 3.5;
const HIST_BINS: usize = 60;

/// Fixed-range histogram of improvement ratios with a point-mass count at
/// exactly one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramData {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    /// Samples within [`RATIO_ONE_TOL`] of one.
    pub n_equal_one: u64,
    pub fraction_equal_one: f64,
    pub fraction_above_one: f64,
    pub fraction_below_one: f64,
}

impl HistogramData {
    /// Bins ratios over [0.5, 3.5]; out-of-range samples land in the end
    /// bins, so the counts always sum to the sample count.
    pub fn build(ratios: &[f64]) -> Self {
        let mut counts = vec![0u64; HIST_BINS];
        let mut n_equal_one = 0u64;
        let mut above = 0u64;
        let mut below = 0u64;
        for &r in ratios {
            let raw = (r - HIST_LO) / (HIST_HI - HIST_LO) * HIST_BINS as f64;
            let idx = (raw.floor().max(0.0) as usize).min(HIST_BINS - 1);
            counts[idx] += 1;
            if (r - 1.0).abs() <= RATIO_ONE_TOL {
                n_equal_one += 1;
            } else if r > 1.0 {
                above += 1;
            } else {
                below += 1;
            }
        }
        let n = ratios.len() as u64;
        let frac = |c: u64| if n == 0 { 0.0 } else { c as f64 / n as f64 };
        HistogramData {
            lo: HIST_LO,
            hi: HIST_HI,
            counts,
            n_samples: n,
            n_equal_one,
            fraction_equal_one: frac(n_equal_one),
            fraction_above_one: frac(above),
            fraction_below_one: frac(below),
        }
    }

    /// The `counts.len() + 1` bin boundaries.
    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.counts.len())
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / self.counts.len() as f64)
            .collect()
    }
}

/// Configuration of the camera Monte Carlo study.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub n_trials: u64,
    pub seed: u64,
    /// Scenario template; its own seed field is replaced per trial.
    pub scenario: CameraScenarioSpec,
    pub budget: EvalBudget,
}

impl MonteCarloConfig {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        MonteCarloConfig {
            n_trials,
            seed,
            scenario: CameraScenarioSpec::default(),
            budget: EvalBudget::default(),
        }
    }
}

/// One random scenario's policy values.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub scenario_seed: u64,
    pub f_nominal: f64,
    pub f_augmented: f64,
    /// Augmented over sequential greedy (one when both are zero).
    pub improvement: f64,
}

/// Monte Carlo results with the improvement bounds they must respect.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub config: MonteCarloConfig,
    pub improvement_lower: f64,
    pub improvement_upper: f64,
    pub rows: Vec<TrialRow>,
    pub histogram: HistogramData,
    /// Trials whose improvement left the closed-form interval.
    pub n_outside_bounds: u64,
}

fn monte_carlo_trial(config: &MonteCarloConfig, trial: u64) -> Result<TrialRow> {
    let scenario_seed = derive_seed(config.seed, trial);
    let spec = CameraScenarioSpec { seed: scenario_seed, ..config.scenario };
    let cam = gen_camera_scenario(&spec)?;
    let nominal =
        run_policy(&cam.instance, PolicySpec::new(PolicyKind::Nominal), config.budget)?;
    let augmented =
        run_policy(&cam.instance, PolicySpec::new(PolicyKind::Augmented), config.budget)?;
    let improvement = if nominal.total <= VALUE_EPS {
        if augmented.total <= VALUE_EPS {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        augmented.total / nominal.total
    };
    Ok(TrialRow {
        trial,
        scenario_seed,
        f_nominal: nominal.total,
        f_augmented: augmented.total,
        improvement,
    })
}

/// Draws seeded scenarios, runs both policies on each, and histograms the
/// improvement ratios against the closed-form interval.
pub fn run_monte_carlo(config: MonteCarloConfig) -> Result<MonteCarloReport> {
    if config.n_trials == 0 {
        return Err(Error::InvalidSpec("need at least one trial".into()));
    }
    let bounds = improvement_bounds(
        config.scenario.n_vehicles,
        config.scenario.k,
        config.scenario.m,
    )?;
    let rows: Vec<TrialRow> = (0..config.n_trials)
        .into_par_iter()
        .map(|trial| monte_carlo_trial(&config, trial))
        .collect::<Result<_>>()?;
    let improvements: Vec<f64> = rows.iter().map(|r| r.improvement).collect();
    let histogram = HistogramData::build(&improvements);
    let n_outside_bounds = improvements
        .iter()
        .filter(|&&r| r < bounds.lower - BOUND_TOL || r > bounds.upper + BOUND_TOL)
        .count() as u64;
    Ok(MonteCarloReport {
        config,
        improvement_lower: bounds.lower,
        improvement_upper: bounds.upper,
        rows,
        histogram,
        n_outside_bounds,
    })
}

/// One self-check suite's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the whole self-check run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suites: Vec<SuiteResult>,
    pub all_passed: bool,
}

fn suite(
    name: &str,
    body: impl FnOnce() -> std::result::Result<String, String>,
) -> SuiteResult {
    match body() {
        Ok(detail) => SuiteResult { name: name.into(), passed: true, detail },
        Err(detail) => SuiteResult { name: name.into(), passed: false, detail },
    }
}

fn require(cond: bool, what: &str) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

/// Deliberately supermodular: the square of the subset size.  The
/// submodularity check must catch it.
struct SquaredSize {
    n: usize,
}

impl SetFunction for SquaredSize {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, a: ElementSet) -> Result<f64> {
        Ok((a.len() * a.len()) as f64)
    }
}

/// Runs every structural check the crate relies on, on fresh seeded
/// instances, and reports one line per suite.
///
/// `exhaustive_cap` bounds the ground size of the exhaustively checked
/// objectives (between 1 and 24); sampled checks run regardless.  `budget`
/// caps the evaluations of the suites that search (the worst-case replays
/// and the density checks).
pub fn run_check(exhaustive_cap: usize, seed: u64, budget: EvalBudget) -> Result<CheckReport> {
    if exhaustive_cap == 0 || exhaustive_cap > 24 {
        return Err(Error::InvalidSpec(format!(
            "exhaustive cap {exhaustive_cap} outside 1..=24"
        )));
    }
    let mut suites = Vec::new();

    suites.push(suite("coverage-exhaustive", || {
        let per_agent = (exhaustive_cap / 3).max(1);
        let mut checked = 0;
        for i in 0..3u64 {
            let gen = gen_random_coverage(RandomCoverageSpec {
                n_agents: 3.min(exhaustive_cap),
                max_elems_per_agent: per_agent,
                n_cells: 6,
                weight_min: 1,
                weight_max: 4,
                k: 2,
                m: 1,
                seed: derive_seed(seed, i),
            })
            .map_err(|e| e.to_string())?;
            let mode = CheckMode::Exhaustive { max_ground: exhaustive_cap };
            let f = &gen.coverage;
            let norm = check_normalized(f).map_err(|e| e.to_string())?;
            require(norm.passed(), "coverage objective not normalized")?;
            let mono = check_monotone(f, mode).map_err(|e| e.to_string())?;
            require(mono.passed(), &format!("monotonicity broken: {:?}", mono.counterexample))?;
            let sub = check_submodular(f, mode).map_err(|e| e.to_string())?;
            require(sub.passed(), &format!("submodularity broken: {:?}", sub.counterexample))?;
            checked += mono.checked + sub.checked;
        }
        Ok(format!("3 weighted coverage instances, {checked} inequalities"))
    }));

    suites.push(suite("logdet-exhaustive", || {
        let ground = exhaustive_cap.min(8);
        let spec = CameraScenarioSpec {
            n_vehicles: 1,
            images_per_vehicle: ground,
            n_targets: 2,
            seed: derive_seed(seed, 100),
            k: 2,
            m: 0,
            ..CameraScenarioSpec::default()
        };
        let cam = gen_camera_scenario(&spec).map_err(|e| e.to_string())?;
        let mode = CheckMode::Exhaustive { max_ground: exhaustive_cap };
        let norm = check_normalized(&cam.logdet).map_err(|e| e.to_string())?;
        require(norm.passed(), "log-det objective not normalized")?;
        let mono = check_monotone(&cam.logdet, mode).map_err(|e| e.to_string())?;
        require(mono.passed(), &format!("monotonicity broken: {:?}", mono.counterexample))?;
        let sub = check_submodular(&cam.logdet, mode).map_err(|e| e.to_string())?;
        require(sub.passed(), &format!("submodularity broken: {:?}", sub.counterexample))?;
        Ok(format!(
            "log-det over {ground} images, {} inequalities",
            mono.checked + sub.checked
        ))
    }));

    suites.push(suite("camera-sampled", || {
        let spec = CameraScenarioSpec { seed: derive_seed(seed, 200), ..Default::default() };
        let cam = gen_camera_scenario(&spec).map_err(|e| e.to_string())?;
        let mode = CheckMode::Sampled { samples: 4_000, seed: derive_seed(seed, 201) };
        let mono = check_monotone(&cam.logdet, mode).map_err(|e| e.to_string())?;
        require(mono.passed(), &format!("monotonicity broken: {:?}", mono.counterexample))?;
        let sub = check_submodular(&cam.logdet, mode).map_err(|e| e.to_string())?;
        require(sub.passed(), &format!("submodularity broken: {:?}", sub.counterexample))?;
        Ok(format!(
            "default camera scenario, {} sampled inequalities",
            mono.checked + sub.checked
        ))
    }));

    suites.push(suite("supermodular-detected", || {
        let f = SquaredSize { n: exhaustive_cap.min(10) };
        let mode = CheckMode::Exhaustive { max_ground: exhaustive_cap };
        let mono = check_monotone(&f, mode).map_err(|e| e.to_string())?;
        require(mono.passed(), "squared size should be monotone")?;
        let sub = check_submodular(&f, mode).map_err(|e| e.to_string())?;
        require(!sub.passed(), "planted supermodular objective went undetected")?;
        Ok("planted supermodular objective rejected with a counterexample".into())
    }));

    suites.push(suite("worst-case-ratios", || {
        let cases = [
            (WorstCaseVariant::A, 2, 2, 1),
            (WorstCaseVariant::A, 3, 3, 1),
            (WorstCaseVariant::B, 2, 2, 2),
            (WorstCaseVariant::B, 3, 2, 2),
        ];
        for (variant, n, k, m) in cases {
            let report = run_worst_case(WorstCaseSpec::new(variant, n, k, m), budget)
                .map_err(|e| e.to_string())?;
            require(
                report.exact_match,
                &format!(
                    "variant {variant} ({n}, {k}, {m}) achieved {}/{}, expected {}/{}",
                    report.achieved_num,
                    report.achieved_den,
                    report.expected_num,
                    report.expected_den
                ),
            )?;
        }
        Ok(format!("{} constructions hit their ratios exactly", cases.len()))
    }));

    suites.push(suite("bound-grid", || {
        let mut points = 0;
        for n in 2..=8 {
            for k in 1..=8 {
                for m in 0..=8 {
                    let b = bound_report(n, k, m).map_err(|e| e.to_string())?;
                    require(
                        b.opt_ratio_lower <= b.opt_ratio_upper + BOUND_TOL,
                        &format!("guarantee above ceiling at ({n}, {k}, {m})"),
                    )?;
                    require(
                        (0.5..=1.0).contains(&b.opt_ratio_lower)
                            && (0.5..=1.0).contains(&b.opt_ratio_upper),
                        &format!("ratio bound escaped [1/2, 1] at ({n}, {k}, {m})"),
                    )?;
                    require(
                        b.improvement_lower <= b.improvement_upper,
                        &format!("improvement interval empty at ({n}, {k}, {m})"),
                    )?;
                    points += 1;
                }
            }
        }
        let b = bound_report(3, 2, 2).map_err(|e| e.to_string())?;
        require(
            (b.opt_ratio_upper - 0.6).abs() < 1e-12
                && (b.opt_ratio_lower - 0.6).abs() < 1e-12
                && (b.improvement_upper - 3.0).abs() < 1e-12,
            "frozen bound values moved",
        )?;
        Ok(format!("{points} parameter triples ordered correctly"))
    }));

    suites.push(suite("subset-density", || {
        use rand::{Rng, SeedableRng};
        let gen = gen_random_coverage(RandomCoverageSpec {
            n_agents: 2,
            max_elems_per_agent: 6,
            n_cells: 7,
            weight_min: 1,
            weight_max: 3,
            k: 3,
            m: 0,
            seed: derive_seed(seed, 300),
        })
        .map_err(|e| e.to_string())?;
        let f = &gen.coverage;
        let ground = f.ground_size();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, 301));
        let mut checked = 0;
        for _ in 0..40 {
            let mut a = ElementSet::empty();
            let mut b = ElementSet::empty();
            for id in 0..ground as u32 {
                match rng.gen_range(0..3) {
                    0 => a = a.with(id),
                    1 => b = b.with(id),
                    _ => {}
                }
            }
            if a.is_empty() {
                continue;
            }
            let whole = marginal(f, a, b).map_err(|e| e.to_string())?;
            for l in 1..=a.len() {
                let (_, gain) =
                    best_subset(f, a, l, b, budget).map_err(|e| e.to_string())?;
                let floor = whole * l as f64 / a.len() as f64;
                require(
                    gain >= floor - BOUND_TOL,
                    &format!("best {l}-subset of {a} over {b} gained {gain} < {floor}"),
                )?;
                checked += 1;
            }
        }
        Ok(format!("{checked} density inequalities"))
    }));

    let all_passed = suites.iter().all(|s| s.passed);
    Ok(CheckReport { suites, all_passed })
}
