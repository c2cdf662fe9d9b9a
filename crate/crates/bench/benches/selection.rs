//! Benchmarks for the hot paths: policy runs, the exact optimum search, and
//! the two objective evaluations everything else is built on.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use greedypass_core::analysis::brute_force_opt;
use greedypass_core::instances::{
    gen_camera_scenario, gen_random_coverage, gen_worst_case_a, gen_worst_case_b,
    CameraScenarioSpec, RandomCoverageSpec,
};
use greedypass_core::{run_policy, ElementSet, EvalBudget, PolicyKind, PolicySpec, SetFunction};

fn policy_runs(c: &mut Criterion) {
    let wc = gen_worst_case_b(4, 3, 3).expect("valid construction");
    let cam = gen_camera_scenario(&CameraScenarioSpec::default()).expect("valid scenario");
    let mut group = c.benchmark_group("policy-run");
    for kind in [PolicyKind::Nominal, PolicyKind::Augmented] {
        group.bench_function(format!("{kind}-worst-case-30"), |b| {
            b.iter(|| {
                run_policy(
                    black_box(&wc.instance),
                    PolicySpec::new(kind),
                    EvalBudget::default(),
                )
                .unwrap()
            })
        });
        group.bench_function(format!("{kind}-camera-30"), |b| {
            b.iter(|| {
                run_policy(
                    black_box(&cam.instance),
                    PolicySpec::new(kind),
                    EvalBudget::default(),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn exact_search(c: &mut Criterion) {
    let wc = gen_worst_case_a(3, 3, 1).expect("valid construction");
    let random = gen_random_coverage(RandomCoverageSpec {
        n_agents: 3,
        max_elems_per_agent: 6,
        n_cells: 8,
        weight_min: 1,
        weight_max: 3,
        k: 2,
        m: 1,
        seed: 12,
    })
    .expect("valid parameters");
    let mut group = c.benchmark_group("exact-optimum");
    group.bench_function("worst-case-17", |b| {
        b.iter(|| brute_force_opt(black_box(&wc.instance), EvalBudget::default()).unwrap())
    });
    group.bench_function("random-coverage-18", |b| {
        b.iter(|| brute_force_opt(black_box(&random.instance), EvalBudget::default()).unwrap())
    });
    group.finish();
}

fn objective_eval(c: &mut Criterion) {
    let cam = gen_camera_scenario(&CameraScenarioSpec::default()).expect("valid scenario");
    let cov = gen_random_coverage(RandomCoverageSpec {
        n_agents: 4,
        max_elems_per_agent: 8,
        n_cells: 12,
        weight_min: 1,
        weight_max: 5,
        k: 2,
        m: 1,
        seed: 3,
    })
    .expect("valid parameters");
    let mut group = c.benchmark_group("objective-eval");
    let full_cam = ElementSet::full(cam.logdet.ground_size());
    group.bench_function("logdet-full-30", |b| {
        b.iter(|| cam.logdet.eval(black_box(full_cam)).unwrap())
    });
    let full_cov = ElementSet::full(cov.coverage.ground_size());
    group.bench_function("coverage-full", |b| {
        b.iter(|| cov.coverage.eval(black_box(full_cov)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, policy_runs, exact_search, objective_eval);
criterion_main!(benches);
