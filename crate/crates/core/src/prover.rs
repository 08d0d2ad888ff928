//! Honest-prover schedules for YES instances.

use crate::error::{Error, Result};
use crate::logical::LogicalIndex;
use crate::qaoa::QaoaInstance;
use crate::schedule::Schedule;
use crate::vqa::VqaInstance;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq)]
pub struct HonestPlan {
    pub schedule: Schedule,
    pub predicted_length: usize,
    pub target_expectation_bound: f64,
    /// Expected logical index (up to phase) after each step; entry `i` is
    /// the index after `i + 1` steps.
    pub checkpoints: Vec<LogicalIndex>,
}

fn to_mask(y: &[bool], a: usize) -> Result<u64> {
    if y.len() != a {
        return Err(Error::LengthMismatch { expected: a, got: y.len() });
    }
    Ok(y.iter().enumerate().filter(|(_, &b)| b).fold(0u64, |m, (i, _)| m | (1 << i)))
}

/// For each `j`: if `y_j = 1`, `F₁…F_{|D|−1}`, `P_j`, `F_{|D|−1}…F₁`; then `G_j`;
/// finally `Q₁…Q_L`. All at `π/2`.
pub fn honest_vqa_schedule(y: &[bool], instance: &VqaInstance) -> Result<HonestPlan> {
    let r = instance.registers;
    to_mask(y, r.a)?;
    let mut s = Schedule::new();
    let mut cp = Vec::new();
    let mut cur = LogicalIndex::start();
    let mut step = |s: &mut Schedule, id: String, next: LogicalIndex| {
        s.push(id, FRAC_PI_2);
        cp.push(next);
        next
    };
    for j in 1..=r.a {
        if y[j - 1] {
            for f in 1..r.d {
                cur = step(&mut s, format!("F{f}"), LogicalIndex { s: f + 1, ..cur });
            }
            cur = step(&mut s, format!("P{j}"), LogicalIndex { y: cur.y ^ (1 << (j - 1)), ..cur });
            for f in (1..r.d).rev() {
                cur = step(&mut s, format!("F{f}"), LogicalIndex { s: f, ..cur });
            }
        }
        cur = step(&mut s, format!("G{j}"), LogicalIndex { t: j + 1, ..cur });
    }
    for k in 1..=instance.l() {
        cur = step(&mut s, format!("Q{k}"), LogicalIndex { t: r.a + k + 1, ..cur });
    }
    let hw = y.iter().filter(|&&b| b).count();
    Ok(HonestPlan { predicted_length: hw * (2 * r.d - 1) + r.a + instance.l(), schedule: s, target_expectation_bound: 1.0 / 3.0, checkpoints: cp })
}

/// The alternating `H_c`/`H_b` plan.
///
/// Per proof bit `j`: `H_c` at `π/(2κ)` moves `2j−1 → 2j` via `G_{2j−1}`. For
/// `y_j = 0`, `H_b` at `4π/3` moves `(2j,1) → (2j+1,1)` through the
/// `G_{2j}` cycle. For `y_j = 1`, `H_b` at `2π/3` enters `(2j,2)`, the
/// `F₂…F_{|D|−1}` ladder climbs to `|D|` (alternating `H_c`/`H_b`), `P_j`
/// flips `y_j`, the ladder descends, and `H_b` at `2π/3` exits to
/// `(2j+1,1)`. Then `Q₁…Q_L` alternate starting with `H_c`.
pub fn honest_qaoa_schedule(y: &[bool], instance: &QaoaInstance) -> Result<HonestPlan> {
    let r = instance.registers;
    to_mask(y, r.a)?;
    let hc = FRAC_PI_2 / instance.kappa;
    let ham_for = |index: usize| if index.is_multiple_of(2) { "Hc" } else { "Hb" };
    let mut s = Schedule::new();
    let mut cp = Vec::new();
    let mut cur = LogicalIndex::start();
    let mut step = |s: &mut Schedule, id: &str, theta: f64, next: LogicalIndex| {
        s.push(id, theta);
        cp.push(next);
        next
    };
    for j in 1..=r.a {
        cur = step(&mut s, "Hc", hc, LogicalIndex { t: 2 * j, ..cur });
        if y[j - 1] {
            cur = step(&mut s, "Hb", 2.0 * PI / 3.0, LogicalIndex { s: 2, ..cur });
            for f in 2..r.d {
                let theta = if f % 2 == 0 { hc } else { FRAC_PI_2 };
                cur = step(&mut s, ham_for(f), theta, LogicalIndex { s: f + 1, ..cur });
            }
            cur = step(&mut s, "Hc", hc, LogicalIndex { y: cur.y ^ (1 << (j - 1)), ..cur });
            for f in (2..r.d).rev() {
                let theta = if f % 2 == 0 { hc } else { FRAC_PI_2 };
                cur = step(&mut s, ham_for(f), theta, LogicalIndex { s: f, ..cur });
            }
            cur = step(&mut s, "Hb", 2.0 * PI / 3.0, LogicalIndex { t: 2 * j + 1, s: 1, ..cur });
        } else {
            cur = step(&mut s, "Hb", 4.0 * PI / 3.0, LogicalIndex { t: 2 * j + 1, ..cur });
        }
    }
    let off = 2 * r.a;
    for k in 1..=instance.l() {
        let (id, theta) = if k % 2 == 1 { ("Hc", hc) } else { ("Hb", FRAC_PI_2) };
        cur = step(&mut s, id, theta, LogicalIndex { t: off + k + 1, ..cur });
    }
    let _ = cur;
    let hw = y.iter().filter(|&&b| b).count();
    let plan = HonestPlan {
        predicted_length: hw * (2 * r.d - 2) + r.c - 1,
        schedule: s,
        target_expectation_bound: 1.0 / 3.0,
        checkpoints: cp,
    };
    plan.schedule.qaoa_steps()?;
    Ok(plan)
}
