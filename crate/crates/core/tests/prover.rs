//! Honest-prover schedules: lengths, checkpoints and final overlaps.

use depth_forge::circuit::{preprocess, reference, QmsaInstance};
use depth_forge::fixtures::{qaoa_reference, qaoa_reference_with, vqa_reference, vqa_yes, DELTA};
use depth_forge::logical::{LogicalIndex, LogicalState};
use depth_forge::prover::{honest_qaoa_schedule, honest_vqa_schedule};
use depth_forge::qaoa::{QaoaOptions, Semantics};
use depth_forge::schedule::{simulate_qaoa, simulate_vqa, Engine, FinalState, Simulation};
use depth_forge::vqa::build_vqa;
use proptest::prelude::*;

fn logical(sim: &Simulation) -> &LogicalState {
    match &sim.final_state {
        FinalState::Logical(s) => s,
        FinalState::Dense(_) => panic!("expected a logical final state"),
    }
}

#[test]
fn vqa_plan_lengths() {
    let v = vqa_reference();
    let (a, l, d) = (v.registers.a, v.l(), v.registers.d);
    assert_eq!(honest_vqa_schedule(&[false, false], &v).unwrap().schedule.len(), a + l);
    let e1 = honest_vqa_schedule(&[true, false], &v).unwrap();
    assert_eq!(e1.schedule.len(), 12);
    assert_eq!(e1.predicted_length, (2 * d - 1) + a + l);
    assert!(honest_vqa_schedule(&[true], &v).is_err());
}

#[test]
fn vqa_plan_lands_on_the_final_clock_state() {
    let v = vqa_yes();
    for y in [[false, false], [true, false], [false, true], [true, true]] {
        let plan = honest_vqa_schedule(&y, &v).unwrap();
        let mut state = LogicalState::start();
        for ((g, theta), cp) in plan.schedule.vqa_steps(&v).unwrap().into_iter().zip(&plan.checkpoints) {
            state = depth_forge::logical::evolve_logical_vqa(&v, &state, g, theta).unwrap();
            assert!((state.get(cp).norm() - 1.0).abs() < 1e-9, "checkpoint {cp}");
        }
        let mask = y.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1u64 << i).sum();
        let sim = simulate_vqa(&v, &plan.schedule, Engine::Logical).unwrap();
        let overlap = logical(&sim).get(&LogicalIndex::new(mask, v.registers.c, 1)).norm();
        assert!((overlap - 1.0).abs() < 1e-9);
        // y₁ decides acceptance
        let want = if y[0] { 0.0 } else { 1.0 };
        assert!((sim.final_expectation() - want).abs() < 1e-9);
    }
}

#[test]
fn qaoa_plan_lengths() {
    let q = qaoa_reference();
    let (c, d) = (q.registers.c, q.registers.d);
    assert_eq!(honest_qaoa_schedule(&[false], &q).unwrap().schedule.len(), c - 1);
    let one = honest_qaoa_schedule(&[true], &q).unwrap();
    assert_eq!(one.schedule.len(), (2 * d - 2) + c - 1);
    assert_eq!(one.schedule.len() as u64, q.m);
    assert_eq!(one.predicted_length, one.schedule.len());
}

#[test]
fn qaoa_plan_checkpoints_without_the_flip_penalty() {
    let q = qaoa_reference_with(QaoaOptions { p_penalty: false, ..Default::default() });
    for y in [[false], [true]] {
        let plan = honest_qaoa_schedule(&y, &q).unwrap();
        let sim = simulate_qaoa(&q, &plan.schedule, Engine::Logical, Semantics::DropM).unwrap();
        let last = plan.checkpoints.last().unwrap();
        assert_eq!(*last, LogicalIndex::new(y[0] as u64, q.registers.c, 1));
        assert!((logical(&sim).get(last).norm() - 1.0).abs() < 1e-9, "y={y:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vqa_plan_length_formula(a in 1usize..=3, d in 2usize..=6, mask in 0u64..8) {
        let c = preprocess(&reference::y1_acceptor(a)).unwrap();
        let v = build_vqa(&QmsaInstance::new(c, 0, 0, 1e-3).unwrap(), DELTA, Some(d)).unwrap();
        let y: Vec<bool> = (0..a).map(|i| (mask >> i) & 1 == 1).collect();
        let hw = y.iter().filter(|&&b| b).count();
        let plan = honest_vqa_schedule(&y, &v).unwrap();
        prop_assert_eq!(plan.schedule.len(), hw * (2 * d - 1) + a + v.l());
        prop_assert_eq!(plan.predicted_length, plan.schedule.len());
        prop_assert_eq!(plan.checkpoints.len(), plan.schedule.len());
    }
}
