//! Release gate: one test per numbered criterion, each printing a single
//! `ACCEPTANCE n (...): PASS` or `... FAIL` line.
//!
//! Run `cargo test --test acceptance -- --nocapture` to see the lines as
//! they complete.  Criteria 3 through 6 share one corpus of a thousand
//! seeded coverage instances, built once and solved to optimality.

use std::sync::OnceLock;
use std::time::Instant;

use greedypass_core::analysis::{
    augmented_ratio_lower_bound, brute_force_opt, check_alpha_bound, improvement_bounds,
    opt_ratio_upper_bound, OptResult,
};
use greedypass_core::harness::{run_monte_carlo, run_worst_case, MonteCarloConfig};
use greedypass_core::instances::{
    gen_camera_scenario, gen_random_coverage, CameraScenarioSpec, RandomCoverage,
    RandomCoverageSpec, WorstCaseSpec, WorstCaseVariant,
};
use greedypass_core::{
    check_monotone, check_normalized, check_submodular, run_policy, CheckMode, ElementSet,
    EvalBudget, PolicyKind, PolicySpec, SetFunction,
};
use num::rational::Ratio;
use rayon::prelude::*;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion(number: u32, label: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) if detail.is_empty() => println!("ACCEPTANCE {number} ({label}): PASS"),
        Ok(detail) => println!("ACCEPTANCE {number} ({label}): PASS [{detail}]"),
        Err(why) => {
            println!("ACCEPTANCE {number} ({label}): FAIL [{why}]");
            panic!("criterion {number} ({label}) failed: {why}");
        }
    }
}

struct Entry {
    cov: RandomCoverage,
    opt: OptResult,
}

/// A thousand seeded instances with n in 2..=4, k in 1..=2, at most six
/// elements per agent, each solved exactly.  Shared by criteria 3..=6.
fn corpus() -> &'static [Entry] {
    static CORPUS: OnceLock<Vec<Entry>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        (0..1000u64)
            .into_par_iter()
            .map(|seed| {
                let cov = gen_random_coverage(RandomCoverageSpec {
                    n_agents: 2 + (seed % 3) as usize,
                    max_elems_per_agent: 6,
                    n_cells: 8,
                    weight_min: 1,
                    weight_max: 3,
                    k: 1 + (seed % 2) as usize,
                    m: 1 + (seed % 2) as usize,
                    seed,
                })
                .expect("corpus parameters are valid");
                let opt = brute_force_opt(&cov.instance, EvalBudget::default())
                    .expect("corpus instances fit the default budget");
                Entry { cov, opt }
            })
            .collect()
    })
}

/// Message budgets exercised per corpus instance: none, one, and a full
/// selection's worth.
fn budgets_for(k: usize) -> Vec<usize> {
    let mut ms = vec![0, 1, k];
    ms.dedup();
    ms
}

fn ratio_to_opt(value: f64, opt: f64) -> f64 {
    if opt == 0.0 {
        1.0
    } else {
        value / opt
    }
}

#[test]
fn acceptance_01_worst_case_ratios() {
    criterion(1, "worst-case ratios exact in rational arithmetic", || {
        let start = Instant::now();
        let mut checked = 0u32;
        for n in 2..=5usize {
            for k in 1..=6usize {
                for m in 0..=3usize {
                    for variant in [WorstCaseVariant::A, WorstCaseVariant::B] {
                        let spec = WorstCaseSpec { variant, n_agents: n, k, m };
                        if spec.validate().is_err() {
                            continue;
                        }
                        let report = run_worst_case(spec, EvalBudget::default())
                            .map_err(|e| format!("{variant} n={n} k={k} m={m}: {e}"))?;
                        let closed_form = match variant {
                            WorstCaseVariant::A => Ratio::new(
                                ((k + m) * (n - 1)) as u64,
                                ((2 * k + m) * (n - 1)) as u64,
                            ),
                            WorstCaseVariant::B => Ratio::new(n as u64, (2 * n - 1) as u64),
                        };
                        let achieved = Ratio::new(report.achieved_num, report.achieved_den);
                        ensure!(
                            achieved == closed_form && report.exact_match,
                            "{variant} n={n} k={k} m={m}: achieved {}/{}, closed form {}/{}",
                            report.achieved_num,
                            report.achieved_den,
                            closed_form.numer(),
                            closed_form.denom()
                        );
                        checked += 1;
                    }
                }
            }
        }
        let secs = start.elapsed().as_secs_f64();
        ensure!(secs < 10.0, "took {secs:.1} s, limit is 10 s");
        Ok(format!("{checked} valid parameter triples, {secs:.2} s"))
    });
}

#[test]
fn acceptance_02_bound_point_values() {
    criterion(2, "stated point values of the closed-form bounds", || {
        let tol = 1e-12;
        for k in 1..=8 {
            let lower = augmented_ratio_lower_bound(2, k, k).map_err(|e| e.to_string())?;
            let upper = opt_ratio_upper_bound(2, k, k).map_err(|e| e.to_string())?;
            ensure!(
                (lower - 2.0 / 3.0).abs() <= tol && (upper - 2.0 / 3.0).abs() <= tol,
                "two agents with m = k = {k}: got lower {lower}, upper {upper}, want 2/3"
            );
        }
        for n in 2..=6usize {
            for k in 1..=6usize {
                let at_k = opt_ratio_upper_bound(n, k, k).map_err(|e| e.to_string())?;
                for m in k..=(k + 5) {
                    let lower = augmented_ratio_lower_bound(n, k, m).map_err(|e| e.to_string())?;
                    let upper = opt_ratio_upper_bound(n, k, m).map_err(|e| e.to_string())?;
                    ensure!(
                        (upper - lower).abs() <= tol,
                        "n={n} k={k} m={m}: saturated bounds differ, {lower} vs {upper}"
                    );
                    ensure!(
                        (upper - at_k).abs() <= tol,
                        "n={n} k={k} m={m}: ceiling moved past m = k, {at_k} to {upper}"
                    );
                }
            }
        }
        let improvement = improvement_bounds(3, 2, 2).map_err(|e| e.to_string())?;
        ensure!(
            (improvement.upper - 3.0).abs() <= tol,
            "improvement ceiling at n=3, k=m=2 is {}, want 3",
            improvement.upper
        );
        Ok(String::new())
    });
}

#[test]
fn acceptance_03_sequential_guarantee() {
    criterion(3, "sequential greedy within half of the optimum", || {
        let start = Instant::now();
        let entries = corpus();
        let mut worst = f64::INFINITY;
        for (i, e) in entries.iter().enumerate() {
            let ng = run_policy(
                &e.cov.instance,
                PolicySpec::new(PolicyKind::Nominal),
                EvalBudget::default(),
            )
            .map_err(|err| format!("instance {i}: {err}"))?;
            ensure!(
                2.0 * ng.total >= e.opt.value,
                "instance {i} (seed {}): sequential value {} below half of optimum {}",
                e.cov.spec.seed,
                ng.total,
                e.opt.value
            );
            worst = worst.min(ratio_to_opt(ng.total, e.opt.value));
        }
        let secs = start.elapsed().as_secs_f64();
        ensure!(secs < 60.0, "took {secs:.1} s, limit is 60 s");
        Ok(format!(
            "{} instances, worst ratio {worst:.4}, {secs:.1} s",
            entries.len()
        ))
    });
}

#[test]
fn acceptance_04_augmented_guarantee() {
    criterion(4, "augmented ratio meets its closed-form floor", || {
        let mut runs = 0u32;
        let mut worst_slack = f64::INFINITY;
        for (i, e) in corpus().iter().enumerate() {
            let n = e.cov.instance.n_agents();
            let k = e.cov.instance.k;
            for m in budgets_for(k) {
                let inst = e.cov.instance.with_m(m);
                let ag = run_policy(
                    &inst,
                    PolicySpec::new(PolicyKind::Augmented),
                    EvalBudget::default(),
                )
                .map_err(|err| format!("instance {i} m={m}: {err}"))?;
                let floor = augmented_ratio_lower_bound(n, k, m).map_err(|e| e.to_string())?;
                let ratio = ratio_to_opt(ag.total, e.opt.value);
                ensure!(
                    ratio >= floor - 1e-9,
                    "instance {i} (seed {}) m={m}: ratio {ratio} below floor {floor}",
                    e.cov.spec.seed
                );
                worst_slack = worst_slack.min(ratio - floor);
                runs += 1;
            }
        }
        Ok(format!("{runs} runs, smallest slack over the floor {worst_slack:.4}"))
    });
}

#[test]
fn acceptance_05_improvement_interval() {
    criterion(5, "message improvement inside its interval", || {
        let mut runs = 0u32;
        for (i, e) in corpus().iter().enumerate() {
            let n = e.cov.instance.n_agents();
            let k = e.cov.instance.k;
            let ng = run_policy(
                &e.cov.instance,
                PolicySpec::new(PolicyKind::Nominal),
                EvalBudget::default(),
            )
            .map_err(|err| format!("instance {i}: {err}"))?;
            for m in budgets_for(k) {
                let inst = e.cov.instance.with_m(m);
                let ag = run_policy(
                    &inst,
                    PolicySpec::new(PolicyKind::Augmented),
                    EvalBudget::default(),
                )
                .map_err(|err| format!("instance {i} m={m}: {err}"))?;
                let improvement = if ng.total == 0.0 { 1.0 } else { ag.total / ng.total };
                let bounds = improvement_bounds(n, k, m).map_err(|e| e.to_string())?;
                ensure!(
                    improvement >= bounds.lower - 1e-9 && improvement <= bounds.upper + 1e-9,
                    "instance {i} (seed {}) m={m}: improvement {improvement} outside \
                     [{}, {}]",
                    e.cov.spec.seed,
                    bounds.lower,
                    bounds.upper
                );
                if m == 0 {
                    ensure!(
                        ag.agents == ng.agents && ag.total == ng.total,
                        "instance {i} (seed {}): run without messages diverges from \
                         the sequential run",
                        e.cov.spec.seed
                    );
                }
                runs += 1;
            }
        }
        Ok(format!("{runs} runs"))
    });
}

#[test]
fn acceptance_06_per_step_certificate() {
    criterion(6, "per-step certificate premise and conclusion", || {
        let mut runs = 0u32;
        for (i, e) in corpus().iter().enumerate() {
            let k = e.cov.instance.k;
            for m in budgets_for(k) {
                if m == 0 {
                    continue;
                }
                let inst = e.cov.instance.with_m(m);
                let ag = run_policy(
                    &inst,
                    PolicySpec::new(PolicyKind::Augmented),
                    EvalBudget::default(),
                )
                .map_err(|err| format!("instance {i} m={m}: {err}"))?;
                let alpha = (k as f64 / m as f64).max(1.0);
                let report = check_alpha_bound(&inst, &ag, &e.opt, alpha, EvalBudget::default())
                    .map_err(|err| format!("instance {i} m={m}: {err}"))?;
                ensure!(
                    report.premise_holds,
                    "instance {i} (seed {}) m={m}: certificate premise fails",
                    e.cov.spec.seed
                );
                let conclusion = report
                    .conclusion
                    .as_ref()
                    .ok_or_else(|| format!("instance {i} m={m}: conclusion not evaluated"))?;
                ensure!(
                    conclusion.holds,
                    "instance {i} (seed {}) m={m}: ratio {} below certified threshold {}",
                    e.cov.spec.seed,
                    report.ratio,
                    report.threshold
                );
                runs += 1;
            }
        }
        Ok(format!("{runs} certificates"))
    });
}

/// Supermodular on purpose; the checker must produce a counterexample.
struct SquareOfSize {
    n: usize,
}

impl SetFunction for SquareOfSize {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, a: ElementSet) -> greedypass_core::Result<f64> {
        Ok((a.len() * a.len()) as f64)
    }
}

#[test]
fn acceptance_07_objective_validity() {
    criterion(7, "objective checks pass and catch a planted fake", || {
        let exhaustive = CheckMode::Exhaustive { max_ground: 14 };
        let mut checked = 0u64;
        let mut audit = |f: &dyn SetFunction, mode: CheckMode, what: &str| -> Result<(), String> {
            let norm = check_normalized(f).map_err(|e| e.to_string())?;
            ensure!(norm.passed(), "{what}: value at the empty set is not zero");
            let mono = check_monotone(f, mode).map_err(|e| e.to_string())?;
            ensure!(
                mono.passed(),
                "{what}: monotonicity counterexample {:?}",
                mono.counterexample
            );
            let sub = check_submodular(f, mode).map_err(|e| e.to_string())?;
            ensure!(
                sub.passed(),
                "{what}: submodularity counterexample {:?}",
                sub.counterexample
            );
            checked += norm.checked + mono.checked + sub.checked;
            Ok(())
        };

        for seed in 0..3u64 {
            let cov = gen_random_coverage(RandomCoverageSpec {
                n_agents: 3,
                max_elems_per_agent: 4,
                n_cells: 8,
                weight_min: 1,
                weight_max: 5,
                k: 2,
                m: 1,
                seed,
            })
            .map_err(|e| e.to_string())?;
            audit(&cov.coverage, exhaustive, &format!("coverage seed {seed}"))?;
        }

        let small_cam = gen_camera_scenario(&CameraScenarioSpec {
            n_vehicles: 2,
            images_per_vehicle: 7,
            n_targets: 2,
            seed: 3,
            ..CameraScenarioSpec::default()
        })
        .map_err(|e| e.to_string())?;
        audit(&small_cam.logdet, exhaustive, "small camera model")?;

        let sampled = CheckMode::Sampled { samples: 10_000, seed: 11 };
        let big_cov = gen_random_coverage(RandomCoverageSpec {
            n_agents: 5,
            max_elems_per_agent: 8,
            n_cells: 12,
            weight_min: 1,
            weight_max: 5,
            k: 2,
            m: 1,
            seed: 7,
        })
        .map_err(|e| e.to_string())?;
        audit(&big_cov.coverage, sampled, "large coverage instance")?;
        let cam = gen_camera_scenario(&CameraScenarioSpec::default()).map_err(|e| e.to_string())?;
        audit(&cam.logdet, sampled, "full camera model")?;

        let fake = SquareOfSize { n: 8 };
        let verdict = check_submodular(&fake, exhaustive).map_err(|e| e.to_string())?;
        ensure!(
            verdict.counterexample.is_some(),
            "planted supermodular objective was not rejected"
        );
        Ok(format!("{checked} property checks, planted fake rejected"))
    });
}

#[test]
fn acceptance_08_camera_monte_carlo() {
    criterion(8, "camera study stays inside the improvement interval", || {
        let start = Instant::now();
        let report = run_monte_carlo(MonteCarloConfig::new(10_000, 0)).map_err(|e| e.to_string())?;
        ensure!(
            report.n_outside_bounds == 0,
            "{} of {} trials left the improvement interval",
            report.n_outside_bounds,
            report.config.n_trials
        );
        for row in &report.rows {
            ensure!(
                row.improvement >= report.improvement_lower - 1e-9
                    && row.improvement <= 3.0 + 1e-9,
                "trial {} improvement {} outside [{}, 3]",
                row.trial,
                row.improvement,
                report.improvement_lower
            );
        }
        let secs = start.elapsed().as_secs_f64();
        ensure!(secs < 600.0, "took {secs:.0} s, limit is 600 s");
        let h = &report.histogram;
        Ok(format!(
            "10000 trials in {secs:.1} s; fraction at one {:.3}, above {:.3}, below {:.3}",
            h.fraction_equal_one, h.fraction_above_one, h.fraction_below_one
        ))
    });
}
