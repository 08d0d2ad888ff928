//! Compilation of a QMSA instance into a MIN-VQA instance, plus the
//! encoding-size and ratio arithmetic.

use crate::circuit::{QmsaInstance, VerifierCircuit, ENCODING_C0};
use crate::error::{Error, Result};
use crate::generator::{Family, Generator};
use crate::linalg::{bit_length, ceil_log2, identity, kron, ketbra, pauli_x, proj, LocalOp, Mat};
use crate::registers::{ab_position, default_d_size, vqa_registers, Mode, Registers};
use num_rational::Ratio;

#[derive(Debug, Clone, PartialEq)]
pub struct VqaInstance {
    pub registers: Registers,
    /// `F₁…F_{|D|-1}, G₁…G_|A|, P₁…P_|A|, Q₁…Q_L`.
    pub generators: Vec<Generator>,
    pub observable: Generator,
    pub m: u64,
    pub m_prime: u64,
    pub delta: f64,
    pub d_override: Option<usize>,
    pub source: QmsaInstance,
    /// Basis string the instance was conjugated by, if any.
    pub frame: Option<Vec<bool>>,
}

/// `|01⟩⟨10| + |10⟩⟨01|`.
pub fn hop() -> Mat {
    ketbra("01", "10") + ketbra("10", "01")
}

/// Support of `Q_k`'s gate part: the gate's targets mapped into `AB`.
pub fn gate_support(circuit: &VerifierCircuit, k: usize) -> Vec<usize> {
    circuit.gates[k - 1].targets.iter().map(|&q| ab_position(circuit, q)).collect()
}

/// `V ⊗ |01⟩⟨10| + V† ⊗ |10⟩⟨01|` on `R ∪ (C_x, C_{x+1})`.
pub fn q_matrix(v: &Mat) -> Mat {
    kron(v, &ketbra("01", "10")) + kron(&v.adjoint(), &ketbra("10", "01"))
}

pub fn observable_m(r: &Registers, mode: Mode) -> Generator {
    let m = identity(4) - proj("11");
    Generator::new(Family::M, 1, mode, LocalOp::new(vec![r.qb(1), r.qc(r.c)], m))
}

pub fn vqa_thresholds(g: usize, g_prime: usize, r: &Registers, l: usize) -> (u64, u64) {
    let per = 2 * r.d as u64 - 1;
    let base = (r.a + l) as u64;
    (g as u64 * per + base, g_prime as u64 * per + base)
}

pub fn build_vqa(qmsa: &QmsaInstance, delta: f64, d_override: Option<usize>) -> Result<VqaInstance> {
    let circuit = &qmsa.circuit;
    if !(circuit.flags.read_only_proof && circuit.flags.delayed_output) {
        return Err(Error::NotPreprocessed);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInstance(format!("delta must lie in (0, 1), got {delta}")));
    }
    let l = circuit.len();
    let d = match d_override {
        Some(d) if d < 2 => return Err(Error::InvalidInstance(format!("|D| override {d} < 2"))),
        Some(d) => d,
        None => default_d_size(l, delta),
    };
    let r = vqa_registers(circuit, d);
    let mode = Mode::Vqa;
    let mut gens = Vec::with_capacity(2 * r.a + l + d - 1);

    for j in 1..d {
        gens.push(Generator::new(Family::F, j, mode, LocalOp::new(vec![r.qd(j), r.qd(j + 1)], hop())));
    }
    for j in 1..=r.a {
        let m = kron(&hop(), &proj("1"));
        gens.push(Generator::new(Family::G, j, mode, LocalOp::new(vec![r.qc(j), r.qc(j + 1), r.qd(1)], m)));
    }
    for j in 1..=r.a {
        let m = kron(&pauli_x(), &proj("11"));
        gens.push(Generator::new(Family::P, j, mode, LocalOp::new(vec![r.qa(j), r.qc(j), r.qd(d)], m)));
    }
    for k in 1..=l {
        let mut support = gate_support(circuit, k);
        support.extend([r.qc(r.a + k), r.qc(r.a + k + 1)]);
        gens.push(Generator::new(Family::Q, k, mode, LocalOp::new(support, q_matrix(&circuit.gates[k - 1].matrix))));
    }

    let (m, m_prime) = vqa_thresholds(qmsa.g, qmsa.g_prime, &r, l);
    Ok(VqaInstance {
        registers: r,
        generators: gens,
        observable: observable_m(&r, mode),
        m,
        m_prime,
        delta,
        d_override,
        source: qmsa.clone(),
        frame: None,
    })
}

impl VqaInstance {
    pub fn circuit(&self) -> &VerifierCircuit {
        &self.source.circuit
    }

    pub fn l(&self) -> usize {
        self.source.circuit.len()
    }

    pub fn generator(&self, label: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.label() == label)
    }

    pub fn family(&self, f: Family) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(move |g| g.family == f)
    }

    /// Start state `|0⟩_{AB}|1̃⟩_C|1̃⟩_D` as a basis string.
    pub fn start_string(&self) -> Vec<bool> {
        self.registers.clock_string(1, 1)
    }
}

/// Replaces every generator `H` by `X̄HX̄`, `X̄ = ⊗ X^{x_i}`.
pub fn conjugate_instance(instance: &VqaInstance, x: &[bool]) -> Result<VqaInstance> {
    let n = instance.registers.total();
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: x.len() });
    }
    let conj = |g: &Generator| Generator {
        terms: g.terms.iter().map(|t| t.conjugate_by_x(x)).collect(),
        ..g.clone()
    };
    let mut out = instance.clone();
    out.generators = instance.generators.iter().map(conj).collect();
    out.observable = conj(&instance.observable);
    let composed: Vec<bool> = match &instance.frame {
        Some(f) => f.iter().zip(x).map(|(a, b)| a ^ b).collect(),
        None => x.to_vec(),
    };
    out.frame = if composed.iter().any(|&b| b) { Some(composed) } else { None };
    Ok(out)
}

/// Bits for one generator term: `c₀ + 4⌈log₂ n⌉`.
pub fn generator_bits(total_qubits: usize) -> u64 {
    ENCODING_C0 + 4 * ceil_log2(total_qubits) as u64
}

/// Bits for the 2-local observable: `c₀ + 2⌈log₂ n⌉`.
pub fn observable_bits(total_qubits: usize) -> u64 {
    ENCODING_C0 + 2 * ceil_log2(total_qubits) as u64
}

/// Deterministic encoding size `N` of a VQA instance.
pub fn encoding_size(instance: &VqaInstance) -> u64 {
    let n = instance.registers.total();
    let terms: usize = instance.generators.iter().map(|g| g.terms.len()).sum();
    terms as u64 * generator_bits(n) + observable_bits(n) + bit_length(instance.m) + bit_length(instance.m_prime)
}

/// Exact `m′/m`.
pub fn hardness_ratio(instance: &VqaInstance) -> Result<Ratio<u64>> {
    ratio(instance.m, instance.m_prime)
}

pub fn ratio(m: u64, m_prime: u64) -> Result<Ratio<u64>> {
    if m == 0 {
        return Err(Error::ZeroDepth);
    }
    Ok(Ratio::new(m_prime, m))
}

/// Inputs to the `(ε′, δ)` feasibility search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanInputs {
    pub epsilon: f64,
    pub l_prime: u64,
    pub n_v_prime: u64,
    /// Ancillas of the source circuit; `None` charges the worst case `2L′`.
    pub m_v_prime: Option<u64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanReport {
    pub choice: Option<(f64, f64)>,
    pub feasible_points: usize,
    pub grid_points: usize,
    /// Margin `lhs − rhs` of the returned pair.
    pub margin: Option<f64>,
}

/// Register total `|A|+|B|+|C|+|D|` the construction produces for the given
/// source sizes and `δ`.
pub fn planned_qubits(inputs: &PlanInputs, delta: f64) -> f64 {
    let n = inputs.n_v_prime as f64;
    let m = inputs.m_v_prime.unwrap_or(2 * inputs.l_prime) as f64;
    let l = inputs.l_prime as f64 + n + 1.0;
    n + (m + n + 1.0) + (l + n + 1.0) + l.powf(1.0 + delta).ceil()
}

/// `lhs − rhs` of the feasibility inequality, logs base 2:
///
/// `(1−ε′)/(1+δ) ≥ [(1−ε)(log c + log log n_tot) − (1−ε′) log log n_V²] / ((1+δ) log L′) + (1−ε)`.
pub fn goal2_margin(inputs: &PlanInputs, eps_prime: f64, delta: f64) -> f64 {
    let lg = f64::log2;
    let eps = inputs.epsilon;
    let n_tot = planned_qubits(inputs, delta);
    let nv2 = (inputs.n_v_prime as f64).powi(2);
    let lhs = (1.0 - eps_prime) / (1.0 + delta);
    let num = (1.0 - eps) * (lg(inputs.c) + lg(lg(n_tot))) - (1.0 - eps_prime) * lg(lg(nv2));
    let rhs = num / ((1.0 + delta) * lg(inputs.l_prime as f64)) + (1.0 - eps);
    lhs - rhs
}

/// Log-spaced grid over (0.01, 0.99).
pub fn plan_grid(points: usize) -> Vec<f64> {
    let (lo, hi) = (0.01f64.ln(), 0.99f64.ln());
    (0..points).map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp()).collect()
}

pub const PLAN_GRID_POINTS: usize = 64;

/// Searches the grid for a pair satisfying the inequality; returns the one
/// with the largest margin.
pub fn plan_parameters(inputs: &PlanInputs) -> PlanReport {
    let grid = plan_grid(PLAN_GRID_POINTS);
    let usable = inputs.l_prime >= 2 && inputs.n_v_prime >= 2 && inputs.c > 0.0 && inputs.epsilon > 0.0 && inputs.epsilon < 1.0;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut count = 0;
    if usable {
        for &ep in &grid {
            for &dl in &grid {
                let margin = goal2_margin(inputs, ep, dl);
                if margin.is_finite() && margin >= 0.0 {
                    count += 1;
                    if best.is_none_or(|b| margin > b.2) {
                        best = Some((ep, dl, margin));
                    }
                }
            }
        }
    }
    PlanReport {
        choice: best.map(|b| (b.0, b.1)),
        feasible_points: count,
        grid_points: grid.len() * grid.len(),
        margin: best.map(|b| b.2),
    }
}
