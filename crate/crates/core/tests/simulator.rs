//! Simulation engines: closed forms, dense Taylor evolution, the logical
//! engine and the span embedding/projection.

use depth_forge::checker::random_vqa_schedule;
use depth_forge::closed_form::{closed_form_unitary, evolve_closed_form};
use depth_forge::dense::{evolve_dense, DenseState, Operator};
use depth_forge::fixtures::{qaoa_reference, vqa_reference};
use depth_forge::generator::Family;
use depth_forge::linalg::{max_abs, Mat, C64};
use depth_forge::logical::{
    embed, evolve_logical_qaoa, evolve_logical_vqa, expectation_m, project_span, w_function, LogicalIndex, LogicalState, PrefixTable,
};
use depth_forge::qaoa::{Ham, Semantics};
use depth_forge::schedule::{simulate_qaoa, simulate_vqa, vqa_start_dense, Engine, Schedule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

fn find(v: &depth_forge::vqa::VqaInstance, f: Family, i: usize) -> &depth_forge::generator::Generator {
    v.generators.iter().find(|g| g.family == f && g.index == i).unwrap()
}

#[test]
fn closed_form_at_zero_is_the_identity() {
    let v = vqa_reference();
    for g in &v.generators {
        let u = closed_form_unitary(g, 0.0, None).unwrap();
        let n = u.matrix.nrows();
        assert!(max_abs(&(&u.matrix - Mat::identity(n, n))) < 1e-15, "{}", g.label());
    }
}

#[test]
fn closed_form_hop_picks_up_a_phase_of_i() {
    let v = vqa_reference();
    let u = closed_form_unitary(find(&v, Family::F, 1), FRAC_PI_2, None).unwrap();
    assert!((u.matrix[(0b10, 0b01)] - C64::new(0.0, 1.0)).norm() < 1e-15);
    assert!(u.matrix[(0b01, 0b01)].norm() < 1e-15);
    assert!((u.matrix[(0b00, 0b00)] - C64::from(1.0)).norm() < 1e-15);
}

#[test]
fn proof_flip_is_trivial_off_its_clock_step() {
    let v = vqa_reference();
    let u = closed_form_unitary(find(&v, Family::P, 1), 1.234, None).unwrap();
    // local order A_j C_j D_|D|; C_j = 0 rows are untouched
    for x in 0..8 {
        if (x >> 1) & 1 == 0 {
            for y in 0..8 {
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((u.matrix[(y, x)] - C64::from(want)).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn dense_evolution_of_the_zero_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = DenseState::random(6, &mut rng).unwrap();
    assert_eq!(evolve_dense(&s, &Operator::new(), 2.5).max_deviation(&s), 0.0);
}

#[test]
fn closed_form_agrees_with_dense_and_is_unitary() {
    let v = vqa_reference();
    let n = v.registers.total();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let g = &v.generators[rng.gen_range(0..v.generators.len())];
        let theta = rng.gen_range(-7.0..7.0);
        let s = DenseState::random(n, &mut rng).unwrap();
        let a = evolve_closed_form(&s, g, theta, None).unwrap();
        let b = evolve_dense(&s, &g.to_operator(1.0), theta);
        assert!(a.max_deviation(&b) <= 1e-10, "{} at {theta}", g.label());
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let u = closed_form_unitary(g, theta, None).unwrap().matrix;
        let k = u.nrows();
        assert!(max_abs(&(u.adjoint() * &u - Mat::identity(k, k))) < 1e-12);
    }
}

#[test]
fn logical_proof_flip_at_the_top_of_the_ladder() {
    let v = vqa_reference();
    let d = v.registers.d;
    let top = LogicalState::basis(LogicalIndex::new(0, 1, d));
    let out = evolve_logical_vqa(&v, &top, find(&v, Family::P, 1), FRAC_PI_2).unwrap();
    assert_eq!(out.len(), 1);
    assert!((out.get(&LogicalIndex::new(1, 1, d)).norm() - 1.0).abs() < 1e-12);
    // below the top the flip is inert
    let mid = LogicalState::basis(LogicalIndex::new(0, 1, 2));
    let same = evolve_logical_vqa(&v, &mid, find(&v, Family::P, 1), FRAC_PI_2).unwrap();
    assert!(same.max_deviation(&mid) < 1e-15);
}

#[test]
fn logical_gate_step_is_inert_off_its_clock_step() {
    let v = vqa_reference();
    let a = v.registers.a;
    let s = LogicalState::basis(LogicalIndex::new(0, a + 1, 1));
    let q2 = find(&v, Family::Q, 2);
    assert!(evolve_logical_vqa(&v, &s, q2, 0.9).unwrap().max_deviation(&s) < 1e-15);
    let q1 = find(&v, Family::Q, 1);
    let moved = evolve_logical_vqa(&v, &s, q1, FRAC_PI_2).unwrap();
    assert!((moved.get(&LogicalIndex::new(0, a + 2, 1)).norm() - 1.0).abs() < 1e-12);
}

#[test]
fn span_projection_of_clean_and_generic_states() {
    let v = vqa_reference();
    let table = PrefixTable::new(&v).unwrap();
    let phi = vqa_start_dense(&v).unwrap();
    let (logical, residual) = project_span(&v, &table, &phi);
    assert!(residual < 1e-15);
    assert!((logical.get(&LogicalIndex::start()).norm() - 1.0).abs() < 1e-15);
    let noise = DenseState::random(v.registers.total(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert!(project_span(&v, &table, &noise).1 > 0.5);
}

#[test]
fn observable_expectation_examples() {
    let v = vqa_reference();
    let table = PrefixTable::new(&v).unwrap();
    assert!((expectation_m(&v, &table, &LogicalState::start()) - 1.0).abs() < 1e-15);
    let sim = simulate_vqa(&v, &Schedule::new(), Engine::Dense).unwrap();
    assert!((sim.final_expectation() - 1.0).abs() < 1e-15);
    assert_eq!(sim.trajectory.len(), 1);
}

#[test]
fn potential_examples() {
    let q = qaoa_reference();
    assert_eq!(w_function(&q, &LogicalIndex::start()).unwrap(), 1);
    // y = 0 along the first G_even cycle: (2,1), (2,2), (3,1)
    let w = |t, s| w_function(&q, &LogicalIndex::new(0, t, s)).unwrap();
    assert_eq!((w(2, 1), w(2, 2), w(3, 1)), (2, 2, 3));
    // the proof flip at s = |D| leaves W unchanged only through the sign flip
    let d = q.registers.d;
    let before = w_function(&q, &LogicalIndex::new(0, 2, d)).unwrap();
    let after = w_function(&q, &LogicalIndex::new(1, 2, d)).unwrap();
    assert_eq!(after - before, (2 * d as i64 - 4) - 2 * (d as i64 - 2));
    assert!(w_function(&q, &LogicalIndex::new(0, 0, 1)).is_err());
}

#[test]
fn qaoa_engines_agree_and_preserve_norm() {
    let q = qaoa_reference();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut s = Schedule::new();
    for i in 0..6 {
        s.push(if i % 2 == 0 { "Hb" } else { "Hc" }, rng.gen_range(-2.0..2.0));
    }
    let a = simulate_qaoa(&q, &s, Engine::Logical, Semantics::Full).unwrap();
    let b = simulate_qaoa(&q, &s, Engine::Dense, Semantics::Full).unwrap();
    for (x, y) in a.trajectory.iter().zip(&b.trajectory) {
        assert!((x.expectation - y.expectation).abs() < 1e-9, "step {}", x.step);
    }
    let mut l = LogicalState::start();
    for (i, step) in s.qaoa_steps().unwrap().into_iter().enumerate().take(1) {
        l = evolve_logical_qaoa(&q, &l, step.0, step.1, Semantics::DropM).unwrap();
        assert!((l.norm() - 1.0).abs() < 1e-12, "step {i}");
    }
    let hb_only = evolve_logical_qaoa(&q, &LogicalState::start(), Ham::Hb, 0.7, Semantics::Full).unwrap();
    assert!((hb_only.norm() - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn logical_and_dense_engines_commute_with_embedding(seed in any::<u64>(), len in 0usize..12) {
        let v = vqa_reference();
        let table = PrefixTable::new(&v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sched = random_vqa_schedule(&v, &mut rng, len, None);
        let mut logical = LogicalState::start();
        let mut dense = vqa_start_dense(&v).unwrap();
        for (g, theta) in sched.vqa_steps(&v).unwrap() {
            logical = evolve_logical_vqa(&v, &logical, g, theta).unwrap();
            dense = evolve_dense(&dense, &g.to_operator(1.0), theta);
            prop_assert!((logical.norm() - 1.0).abs() < 1e-10);
            for idx in logical.support() {
                prop_assert!(idx.t >= 1 && idx.t <= v.registers.c && idx.s >= 1 && idx.s <= v.registers.d);
            }
        }
        let embedded = embed(&v, &table, &logical).unwrap();
        prop_assert!(embedded.max_deviation(&dense) <= 1e-10);
        let (back, residual) = project_span(&v, &table, &dense);
        prop_assert!(residual <= 1e-9);
        prop_assert!(back.max_deviation(&logical) <= 1e-9);
    }
}
