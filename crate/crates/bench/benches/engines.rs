//! Engine throughput: closed form vs. dense evolution, logical steps,
//! instance construction and a full honest QAOA run.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use depth_forge::closed_form::evolve_closed_form;
use depth_forge::dense::{evolve_dense, DenseState};
use depth_forge::fixtures::{qaoa_reference, vqa_reference, vqa_yes};
use depth_forge::logical::{evolve_logical_vqa, LogicalState};
use depth_forge::prover::{honest_qaoa_schedule, honest_vqa_schedule};
use depth_forge::qaoa::Semantics;
use depth_forge::schedule::{simulate_qaoa, Engine};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn single_step(c: &mut Criterion) {
    let v = vqa_reference();
    let g = v.generators.iter().find(|g| g.label() == "Q1").expect("Q1");
    let state = DenseState::random(v.registers.total(), &mut ChaCha8Rng::seed_from_u64(0)).expect("width");
    let op = g.to_operator(1.0);
    let mut group = c.benchmark_group("single_step");
    group.bench_function("closed_form", |b| b.iter(|| evolve_closed_form(black_box(&state), g, 0.7, None).expect("closed form")));
    group.bench_function("dense_taylor", |b| b.iter(|| evolve_dense(black_box(&state), &op, 0.7)));
    group.finish();
}

fn logical_plan(c: &mut Criterion) {
    let v = vqa_yes();
    let plan = honest_vqa_schedule(&[true, true], &v).expect("plan");
    let steps = plan.schedule.vqa_steps(&v).expect("steps");
    c.bench_function("logical_honest_vqa", |b| {
        b.iter_batched(
            LogicalState::start,
            |mut s| {
                for (g, t) in &steps {
                    s = evolve_logical_vqa(&v, &s, g, *t).expect("step");
                }
                s
            },
            BatchSize::SmallInput,
        )
    });
}

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.bench_function("vqa_reference", |b| b.iter(vqa_reference));
    group.bench_function("qaoa_reference", |b| b.iter(qaoa_reference));
    group.finish();
}

fn qaoa_run(c: &mut Criterion) {
    let q = qaoa_reference();
    let plan = honest_qaoa_schedule(&[true], &q).expect("plan");
    let mut group = c.benchmark_group("honest_qaoa");
    group.sample_size(10);
    group.bench_function("logical", |b| b.iter(|| simulate_qaoa(&q, &plan.schedule, Engine::Logical, Semantics::DropM).expect("run")));
    group.bench_function("dense", |b| b.iter(|| simulate_qaoa(&q, &plan.schedule, Engine::Dense, Semantics::Full).expect("run")));
    group.finish();
}

criterion_group!(benches, single_step, logical_plan, construction, qaoa_run);
criterion_main!(benches);
