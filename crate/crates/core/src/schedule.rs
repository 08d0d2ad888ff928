//! Schedules of `(hamiltonian-id, angle)` steps and their execution on the
//! logical, dense and closed-form engines.

use crate::closed_form::evolve_closed_form;
use crate::dense::{evolve_dense, DenseState};
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::logical::{self, expectation_generator, expectation_m, project_span, LogicalState, PrefixTable};
use crate::qaoa::{Ham, QaoaInstance, Semantics};
use crate::vqa::VqaInstance;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// A generator label (`F1`, `Q3`, …) or `Hb` / `Hc`.
    pub id: String,
    pub theta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    pub steps: Vec<Step>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, id: impl Into<String>, theta: f64) {
        self.steps.push(Step { id: id.into(), theta });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn prefix(&self, n: usize) -> Schedule {
        Schedule { steps: self.steps[..n.min(self.len())].to_vec() }
    }

    /// QAOA steps, requiring strict `H_b`/`H_c` alternation.
    pub fn qaoa_steps(&self) -> Result<Vec<(Ham, f64)>> {
        let mut out: Vec<(Ham, f64)> = Vec::with_capacity(self.len());
        for (i, s) in self.steps.iter().enumerate() {
            let h = parse_ham(&s.id)?;
            if let Some(&(prev, _)) = out.last() {
                if prev == h {
                    return Err(Error::Schedule(format!("step {i}: {} follows {} (schedules must alternate)", h.label(), prev.label())));
                }
            }
            out.push((h, s.theta));
        }
        Ok(out)
    }

    /// VQA steps resolved against an instance's generators.
    pub fn vqa_steps<'a>(&self, instance: &'a VqaInstance) -> Result<Vec<(&'a Generator, f64)>> {
        self.steps
            .iter()
            .map(|s| instance.generator(&s.id).map(|g| (g, s.theta)).ok_or_else(|| Error::UnknownGenerator(s.id.clone())))
            .collect()
    }
}

pub fn parse_ham(id: &str) -> Result<Ham> {
    match id {
        "Hb" | "H_b" => Ok(Ham::Hb),
        "Hc" | "H_c" => Ok(Ham::Hc),
        other => Err(Error::UnknownGenerator(other.into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Logical,
    Dense,
    Closed,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logical" => Ok(Engine::Logical),
            "dense" => Ok(Engine::Dense),
            "closed" => Ok(Engine::Closed),
            other => Err(Error::Parse(format!("unknown engine {other:?}"))),
        }
    }
}

/// One trajectory row: after `step` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub expectation: f64,
    pub span_residual: f64,
}

#[derive(Debug, Clone)]
pub enum FinalState {
    Logical(LogicalState),
    Dense(DenseState),
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub trajectory: Vec<TrajectoryRow>,
    pub final_state: FinalState,
}

impl Simulation {
    pub fn final_expectation(&self) -> f64 {
        self.trajectory.last().expect("step 0 row").expectation
    }

    pub fn final_residual(&self) -> f64 {
        self.trajectory.last().expect("step 0 row").span_residual
    }
}

/// Flips the conjugation frame back so that the standard logical basis applies.
fn unframe(state: &DenseState, frame: Option<&[bool]>) -> DenseState {
    let Some(x) = frame else { return state.clone() };
    let mask = x.iter().enumerate().filter(|(_, &b)| b).fold(0usize, |m, (i, _)| m | (1 << i));
    let amps = state.amplitudes();
    let permuted = (0..amps.len()).map(|i| amps[i ^ mask]).collect();
    DenseState::from_amplitudes(state.qubits(), permuted).expect("same width")
}

/// Dense start state of a VQA instance: `|φ⟩`, seen through its frame.
pub fn vqa_start_dense(instance: &VqaInstance) -> Result<DenseState> {
    let mut bits = instance.start_string();
    if let Some(x) = &instance.frame {
        bits.iter_mut().zip(x).for_each(|(b, f)| *b ^= f);
    }
    let ones: Vec<usize> = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    DenseState::from_ones(instance.registers.total(), &ones)
}

/// Runs a VQA schedule from `|φ⟩`, recording `⟨M⟩` and the span residual.
pub fn simulate_vqa(instance: &VqaInstance, schedule: &Schedule, engine: Engine) -> Result<Simulation> {
    let steps = schedule.vqa_steps(instance)?;
    let table = PrefixTable::new(instance)?;
    let frame = instance.frame.as_deref();
    let mut trajectory = Vec::with_capacity(steps.len() + 1);
    match engine {
        Engine::Logical => {
            let mut state = LogicalState::start();
            trajectory.push(TrajectoryRow { step: 0, expectation: expectation_m(instance, &table, &state), span_residual: 0.0 });
            for (i, (g, theta)) in steps.iter().enumerate() {
                state = logical::evolve_logical_vqa(instance, &state, g, *theta)?;
                trajectory.push(TrajectoryRow { step: i + 1, expectation: expectation_m(instance, &table, &state), span_residual: 0.0 });
            }
            Ok(Simulation { trajectory, final_state: FinalState::Logical(state) })
        }
        Engine::Dense | Engine::Closed => {
            let m_op = instance.observable.to_operator(1.0);
            let mut state = vqa_start_dense(instance)?;
            let row = |i: usize, s: &DenseState| TrajectoryRow {
                step: i,
                expectation: s.expectation(&m_op),
                span_residual: project_span(instance, &table, &unframe(s, frame)).1,
            };
            trajectory.push(row(0, &state));
            for (i, (g, theta)) in steps.iter().enumerate() {
                state = match engine {
                    Engine::Closed => evolve_closed_form(&state, g, *theta, frame)?,
                    _ => evolve_dense(&state, &g.to_operator(1.0), *theta),
                };
                trajectory.push(row(i + 1, &state));
            }
            Ok(Simulation { trajectory, final_state: FinalState::Dense(state) })
        }
    }
}

/// `⟨H_c⟩` of a logical QAOA state (`κΣ𝒢₂ + M`, or without `M`).
pub fn qaoa_logical_cost(instance: &QaoaInstance, table: &PrefixTable, state: &LogicalState, semantics: Semantics) -> f64 {
    let cost: f64 = instance.group2.iter().map(|g| expectation_generator(instance, state, g)).sum::<f64>() * instance.kappa;
    match semantics {
        Semantics::Full => cost + expectation_m(instance, table, state),
        Semantics::DropM => cost,
    }
}

/// Runs a QAOA schedule from `|gs_b⟩`, recording `⟨H_c⟩` and the span residual.
pub fn simulate_qaoa(instance: &QaoaInstance, schedule: &Schedule, engine: Engine, semantics: Semantics) -> Result<Simulation> {
    let steps = schedule.qaoa_steps()?;
    let table = PrefixTable::new(instance)?;
    let mut trajectory = Vec::with_capacity(steps.len() + 1);
    match engine {
        Engine::Logical => {
            let mut state = LogicalState::start();
            let row = |i, s: &LogicalState| TrajectoryRow { step: i, expectation: qaoa_logical_cost(instance, &table, s, semantics), span_residual: 0.0 };
            trajectory.push(row(0, &state));
            for (i, (h, theta)) in steps.iter().enumerate() {
                match logical::evolve_logical_qaoa(instance, &state, *h, *theta, semantics) {
                    Ok(next) => state = next,
                    Err(Error::NeedsDense) => {
                        // `M` acts outside the span at t = |C|; finish on the dense engine
                        log::debug!("logical engine falls back to dense at step {}", i + 1);
                        let hc = instance.hc();
                        let mut dense = logical::embed(instance, &table, &state)?;
                        for (j, (h, theta)) in steps.iter().enumerate().skip(i) {
                            dense = instance.evolve_dense(&dense, *h, *theta, semantics);
                            let span_residual = project_span(instance, &table, &dense).1;
                            trajectory.push(TrajectoryRow { step: j + 1, expectation: dense.expectation(&hc), span_residual });
                        }
                        return Ok(Simulation { trajectory, final_state: FinalState::Dense(dense) });
                    }
                    Err(e) => return Err(e),
                }
                trajectory.push(row(i + 1, &state));
            }
            Ok(Simulation { trajectory, final_state: FinalState::Logical(state) })
        }
        Engine::Dense => {
            let hc = match semantics {
                Semantics::Full => instance.hc(),
                Semantics::DropM => instance.hc_cost(),
            };
            let mut state = instance.ground_state()?;
            let row = |i, s: &DenseState| TrajectoryRow { step: i, expectation: s.expectation(&hc), span_residual: project_span(instance, &table, s).1 };
            trajectory.push(row(0, &state));
            for (i, (h, theta)) in steps.iter().enumerate() {
                state = instance.evolve_dense(&state, *h, *theta, semantics);
                trajectory.push(row(i + 1, &state));
            }
            Ok(Simulation { trajectory, final_state: FinalState::Dense(state) })
        }
        Engine::Closed => Err(Error::NoClosedForm("Hb/Hc".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternation_is_enforced() {
        let mut s = Schedule::new();
        s.push("Hc", 1.0);
        s.push("Hb", 1.0);
        assert!(s.qaoa_steps().is_ok());
        s.push("Hb", 1.0);
        assert!(matches!(s.qaoa_steps(), Err(Error::Schedule(_))));
    }

    #[test]
    fn engine_names() {
        assert_eq!("dense".parse::<Engine>().unwrap(), Engine::Dense);
        assert!("fast".parse::<Engine>().is_err());
    }
}
